#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gaplab/geom.hpp"
#include "oracles.hpp"

using namespace gaplab;
using geom::ModelSpace;
using geom::Point;
using geom::Tangent;
using geom::Vec;

namespace {

constexpr double kPi = 3.14159265358979323846;

Vec vec3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

// Random point within the injectivity radius of the canonical center.
Point random_point(const ModelSpace& space, oracles::TestRng& rng,
                   double max_r) {
  const Point c = geom::base_point(space);
  Vec dir = Vec::Zero(space.ambient_dim());
  for (int i = 0; i < dir.size(); ++i) dir[i] = rng.uniform(-1.0, 1.0);
  dir = geom::tangentialize(space, c, dir);
  dir /= geom::norm(space, dir);
  return geom::exp_map(space, Tangent{c, rng.uniform(0.05, max_r) * dir});
}

Vec random_tangent(const ModelSpace& space, const Point& p,
                   oracles::TestRng& rng) {
  Vec v = Vec::Zero(space.ambient_dim());
  for (int i = 0; i < v.size(); ++i) v[i] = rng.uniform(-1.0, 1.0);
  return geom::tangentialize(space, p, v);
}

}  // namespace

TEST_CASE("sn/cs/tn reference values") {
  CHECK(geom::sn(1.0, kPi / 2) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(geom::sn(-1.0, 1.0) ==
        doctest::Approx(1.1752011936438014).epsilon(1e-14));
  CHECK(geom::cs(-1.0, 1.0) ==
        doctest::Approx(1.5430806348152437).epsilon(1e-14));
  CHECK(geom::tn(-1.0, 1.0) ==
        doctest::Approx(-0.7615941559557649).epsilon(1e-14));
  CHECK(geom::tn(1.0, kPi / 4) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(geom::sn(0.0, 2.5) == 2.5);
  CHECK(geom::cs(0.0, 2.5) == 1.0);
  CHECK(geom::tn(0.0, 2.5) == 0.0);
  CHECK_THROWS_AS((void)geom::tn(1.0, kPi / 2), PoleError);
  CHECK_THROWS_AS((void)geom::tn(4.0, kPi / 4), PoleError);
}

TEST_CASE("sn solves u'' + k u = 0") {
  oracles::TestRng rng(11);
  for (int it = 0; it < 200; ++it) {
    double k = rng.uniform(-4.0, 4.0);
    if (std::abs(k) < 0.05) k = 0.05;
    const double s = rng.uniform(-2.5, 2.5);
    const double h = 1e-4;
    const double d2 =
        (geom::sn(k, s - h) - 2.0 * geom::sn(k, s) + geom::sn(k, s + h)) /
        (h * h);
    const double resid = d2 + k * geom::sn(k, s);
    const double scale = std::max(1.0, std::abs(k * geom::sn(k, s)));
    CHECK(std::abs(resid) / scale < 1e-6);
  }
}

TEST_CASE("tn double angle identity") {
  oracles::TestRng rng(12);
  for (int it = 0; it < 200; ++it) {
    double k = rng.uniform(-4.0, 4.0);
    if (std::abs(k) < 0.05) k = 0.05;
    double xi = rng.uniform(0.01, 1.2);
    if (k > 0) xi = std::min(xi, 0.45 * kPi / std::sqrt(k));
    const double lhs = geom::tn(k, xi);
    const double rhs =
        (1.0 - geom::cs(k, 2.0 * xi)) / geom::sn(k, 2.0 * xi);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("exp_map quarter arc on the unit sphere") {
  const ModelSpace space(1.0, 2);
  const Point p{vec3(0, 0, 1)};
  const Point q = geom::exp_map(space, Tangent{p, vec3(kPi / 2, 0, 0)});
  CHECK((q.coords - vec3(1, 0, 0)).norm() < 1e-12);
}

TEST_CASE("exp_map matches the geodesic ODE on the hyperboloid") {
  const ModelSpace space(-1.0, 2);
  const Point p = geom::base_point(space);
  oracles::TestRng rng(13);
  const Vec u0 = random_tangent(space, p, rng);
  const Vec u = u0 / geom::norm(space, u0);
  const Point q = geom::exp_map(space, Tangent{p, u});
  CHECK(std::abs(geom::distance(space, p, q) - 1.0) < 1e-9);
  const Point q_ode = oracles::geodesic_rk4(space, p, u, 1.0, 20000);
  CHECK((q.coords - q_ode.coords).norm() < 1e-9);
}

TEST_CASE("exp_map matches the geodesic ODE on spheres") {
  for (int n : {2, 3}) {
    const ModelSpace space(2.0, n);
    const Point p = geom::base_point(space);
    oracles::TestRng rng(14 + n);
    const Vec u0 = random_tangent(space, p, rng);
    const Vec u = u0 / geom::norm(space, u0);
    const double len = 1.3;
    const Point q = geom::exp_map(space, Tangent{p, len * u});
    const Point q_ode = oracles::geodesic_rk4(space, p, u, len, 20000);
    CHECK((q.coords - q_ode.coords).norm() < 1e-9);
  }
}

TEST_CASE("log_map inverts exp_map") {
  oracles::TestRng rng(15);
  for (double k : {1.0, 0.5, 0.0, -1.0, -2.0}) {
    for (int n : {2, 3, 4}) {
      const ModelSpace space(k, n);
      const Point p = random_point(space, rng, 0.5);
      Vec v = random_tangent(space, p, rng);
      const double cap = k > 0 ? 0.9 * kPi / std::sqrt(k) : 2.0;
      v *= rng.uniform(0.1, cap) / geom::norm(space, v);
      const Point q = geom::exp_map(space, Tangent{p, v});
      const Tangent back = geom::log_map(space, p, q);
      CHECK((back.vec - v).norm() < 1e-10 * std::max(1.0, v.norm()));
      CHECK(std::abs(geom::distance(space, p, q) - geom::norm(space, v)) <
            1e-10);
    }
  }
}

TEST_CASE("distance quarter arc") {
  const ModelSpace space(1.0, 2);
  CHECK(geom::distance(space, Point{vec3(0, 0, 1)}, Point{vec3(0, 1, 0)}) ==
        doctest::Approx(kPi / 2).epsilon(1e-14));
}

TEST_CASE("log_map rejects antipodal points") {
  const ModelSpace space(1.0, 2);
  CHECK_THROWS_AS(
      (void)geom::log_map(space, Point{vec3(0, 0, 1)}, Point{vec3(0, 0, -1)}),
      AntipodalError);
}

TEST_CASE("exp_map rejects vectors beyond the injectivity radius") {
  const ModelSpace space(1.0, 2);
  const Point p{vec3(0, 0, 1)};
  CHECK_THROWS_AS((void)geom::exp_map(space, Tangent{p, vec3(3.2, 0, 0)}),
                  DomainError);
}

TEST_CASE("parallel transport: quarter arc reference") {
  const ModelSpace space(1.0, 2);
  const Point p{vec3(0, 0, 1)};
  const Point q{vec3(1, 0, 0)};
  const Tangent moved =
      geom::parallel_transport(space, Tangent{p, vec3(1, 0, 0)}, q);
  CHECK((moved.vec - vec3(0, 0, -1)).norm() < 1e-12);
}

TEST_CASE("parallel transport preserves norms and tangency") {
  oracles::TestRng rng(16);
  for (double k : {1.0, 0.0, -1.0}) {
    for (int it = 0; it < 40; ++it) {
      const ModelSpace space(k, 3);
      const Point p = random_point(space, rng, 0.6);
      const Point q = random_point(space, rng, 0.6);
      const Vec v = random_tangent(space, p, rng);
      const Tangent moved = geom::parallel_transport(space, Tangent{p, v}, q);
      CHECK(std::abs(geom::norm(space, moved.vec) - geom::norm(space, v)) <
            1e-12 * std::max(1.0, geom::norm(space, v)));
      if (k != 0.0)
        CHECK(std::abs(geom::dot(space, q.coords, moved.vec)) < 1e-10);
    }
  }
}

TEST_CASE("parallel transport composes along the geodesic") {
  oracles::TestRng rng(17);
  for (double k : {1.0, -1.0}) {
    const ModelSpace space(k, 2);
    const Point p = random_point(space, rng, 0.4);
    const Point q = random_point(space, rng, 0.4);
    const Vec v = random_tangent(space, p, rng);
    const Tangent half = geom::log_map(space, p, q);
    const Point mid =
        geom::exp_map(space, Tangent{p, Vec(0.5 * half.vec)});
    const Tangent direct = geom::parallel_transport(space, Tangent{p, v}, q);
    const Tangent via_mid = geom::parallel_transport(
        space, geom::parallel_transport(space, Tangent{p, v}, mid), q);
    CHECK((direct.vec - via_mid.vec).norm() < 1e-10);
  }
}

TEST_CASE("mirror map in the plane") {
  const ModelSpace space(0.0, 2);
  const Point x{vec2(0, 0)};
  const Point y{vec2(1, 0)};
  const Tangent m1 = geom::mirror_map(space, x, y, Tangent{x, vec2(1, 0)});
  CHECK((m1.vec - vec2(-1, 0)).norm() < 1e-14);
  const Tangent m2 = geom::mirror_map(space, x, y, Tangent{x, vec2(0, 1)});
  CHECK((m2.vec - vec2(0, 1)).norm() < 1e-14);
}

TEST_CASE("mirror map equals transport plus reflection") {
  oracles::TestRng rng(18);
  for (double k : {1.0, 0.0, -1.0}) {
    for (int it = 0; it < 30; ++it) {
      const ModelSpace space(k, 3);
      const Point x = random_point(space, rng, 0.5);
      const Point y = random_point(space, rng, 0.5);
      if (geom::distance(space, x, y) < 1e-6) continue;
      const Vec v = random_tangent(space, x, rng);
      const Tangent mirrored = geom::mirror_map(space, x, y, Tangent{x, v});
      // independent composition: transport, then reflect about the
      // geodesic direction recovered from the y side
      const Tangent moved = geom::parallel_transport(space, Tangent{x, v}, y);
      const Tangent back = geom::log_map(space, y, x);
      const double d = geom::distance(space, x, y);
      const Vec g = Vec(-back.vec / d);
      const Vec expect =
          moved.vec - 2.0 * geom::dot(space, moved.vec, g) * g;
      CHECK((mirrored.vec - expect).norm() < 1e-10);
    }
  }
}

TEST_CASE("mirror map is an involution up to return transport") {
  oracles::TestRng rng(19);
  for (double k : {1.0, 0.0, -1.0}) {
    const ModelSpace space(k, 2);
    const Point x = random_point(space, rng, 0.5);
    const Point y = random_point(space, rng, 0.5);
    if (geom::distance(space, x, y) < 1e-6) continue;
    const Vec v = random_tangent(space, x, rng);
    const Tangent once = geom::mirror_map(space, x, y, Tangent{x, v});
    const Tangent twice = geom::mirror_map(space, y, x, once);
    CHECK((twice.vec - v).norm() < 1e-10 * std::max(1.0, v.norm()));
  }
}

TEST_CASE("mirror map rejects coincident points") {
  const ModelSpace space(0.0, 2);
  const Point x{vec2(0.3, 0.4)};
  CHECK_THROWS_AS(
      (void)geom::mirror_map(space, x, x, Tangent{x, vec2(1, 0)}),
      CoincidentError);
}

TEST_CASE("index form sum closed form") {
  CHECK(geom::index_form_sum(ModelSpace(1.0, 3), 1.0) ==
        doctest::Approx(-4.0 * std::tan(0.5)).epsilon(1e-14));
  CHECK(geom::index_form_sum(ModelSpace(0.0, 5), 1.7) == 0.0);
  CHECK_THROWS_AS((void)geom::index_form_sum(ModelSpace(1.0, 2), 0.0),
                  DomainError);
  CHECK_THROWS_AS((void)geom::index_form_sum(ModelSpace(1.0, 2), 3.2),
                  DomainError);
}

TEST_CASE("index form sum matches quadrature of the variation fields") {
  struct Case {
    int n;
    double k;
    double rho;
  };
  for (const Case c : {Case{2, 1.0, 1.0}, Case{3, 1.0, 0.7},
                       Case{3, -1.0, 1.5}, Case{4, -0.5, 2.0}}) {
    const ModelSpace space(c.k, c.n);
    const double direct = geom::index_form_sum(space, c.rho);
    const double quad = oracles::index_form_quadrature(space, c.rho, 4000);
    CHECK(direct == doctest::Approx(quad).epsilon(1e-8));
  }
}

TEST_CASE("jacobi boundary coefficients") {
  const ModelSpace flat(0.0, 2);
  const double d0 = 1.4;
  CHECK(geom::jacobi_boundary(flat, d0, geom::JacobiEnd::left, d0 / 2) ==
        doctest::Approx(1.0).epsilon(1e-14));
  CHECK(geom::jacobi_boundary(flat, d0, geom::JacobiEnd::left, -d0 / 2) ==
        doctest::Approx(0.0).epsilon(1e-14));
  CHECK(geom::jacobi_boundary(flat, d0, geom::JacobiEnd::right, -d0 / 2) ==
        doctest::Approx(1.0).epsilon(1e-14));

  oracles::TestRng rng(20);
  for (double k : {1.0, 0.0, -1.0}) {
    const ModelSpace space(k, 2);
    for (auto which : {geom::JacobiEnd::left, geom::JacobiEnd::right,
                       geom::JacobiEnd::both}) {
      // boundary data reproduced exactly
      const double at_r =
          geom::jacobi_boundary(space, d0, which, d0 / 2);
      const double at_l =
          geom::jacobi_boundary(space, d0, which, -d0 / 2);
      if (which == geom::JacobiEnd::left) {
        CHECK(at_r == doctest::Approx(1.0));
        CHECK(at_l == doctest::Approx(0.0));
      } else if (which == geom::JacobiEnd::right) {
        CHECK(at_r == doctest::Approx(0.0));
        CHECK(at_l == doctest::Approx(1.0));
      } else {
        CHECK(at_r == doctest::Approx(1.0));
        CHECK(at_l == doctest::Approx(1.0));
      }
      // and each branch solves f'' + k f = 0
      for (int it = 0; it < 20; ++it) {
        const double s = rng.uniform(-d0 / 2 + 0.05, d0 / 2 - 0.05);
        const double h = 1e-4;
        auto f = [&](double ss) {
          return geom::jacobi_boundary(space, d0, which, ss);
        };
        const double resid =
            (f(s - h) - 2.0 * f(s) + f(s + h)) / (h * h) + k * f(s);
        CHECK(std::abs(resid) < 1e-5);
      }
    }
  }
  CHECK_THROWS_AS(
      (void)geom::jacobi_boundary(flat, d0, geom::JacobiEnd::left, d0),
      DomainError);
}

TEST_CASE("adapted frame is orthonormal with prescribed last column") {
  oracles::TestRng rng(21);
  for (double k : {1.0, 0.0, -1.0}) {
    const ModelSpace space(k, 3);
    const Point p = random_point(space, rng, 0.6);
    Vec along = random_tangent(space, p, rng);
    along /= geom::norm(space, along);
    const auto frame = geom::adapted_frame(space, p, along);
    REQUIRE(frame.cols() == 3);
    CHECK((Vec(frame.col(2)) - along).norm() < 1e-12);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const double want = i == j ? 1.0 : 0.0;
        CHECK(std::abs(geom::dot(space, Vec(frame.col(i)),
                                 Vec(frame.col(j))) -
                       want) < 1e-10);
      }
      if (k != 0.0)
        CHECK(std::abs(geom::dot(space, p.coords, Vec(frame.col(i)))) <
              1e-10);
    }
  }
}

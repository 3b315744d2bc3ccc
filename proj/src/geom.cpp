#include "gaplab/geom.hpp"

#include <cmath>
#include <string>

namespace gaplab::geom {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTinyLength = 1e-14;
}  // namespace

ModelSpace::ModelSpace(double k_, int n_) : k(k_), n(n_) {
  if (!(n >= 2)) throw DomainError("ModelSpace: n must be >= 2");
  if (!std::isfinite(k)) throw DomainError("ModelSpace: k must be finite");
  if (ambient_dim() > kMaxAmbient)
    throw DomainError("ModelSpace: ambient dimension exceeds " +
                      std::to_string(kMaxAmbient));
}

double dot(const ModelSpace& space, const Vec& u, const Vec& v) {
  if (space.k < 0.0) {
    double acc = -u[0] * v[0];
    for (int i = 1; i < u.size(); ++i) acc += u[i] * v[i];
    return acc;
  }
  return u.dot(v);
}

double norm(const ModelSpace& space, const Vec& v) {
  double nn = dot(space, v, v);
  if (nn < 0.0) {
    if (nn < -1e-12) throw DomainError("norm: vector is not spacelike");
    nn = 0.0;
  }
  return std::sqrt(nn);
}

Point base_point(const ModelSpace& space) {
  Vec c = Vec::Zero(space.ambient_dim());
  if (space.k > 0.0)
    c[space.n] = 1.0 / std::sqrt(space.k);
  else if (space.k < 0.0)
    c[0] = 1.0 / std::sqrt(-space.k);
  return Point{c};
}

Vec tangentialize(const ModelSpace& space, const Point& p, const Vec& v) {
  if (space.k == 0.0) return v;
  // normal component of v at p is k <p,v> p  because <p,p> = 1/k
  return v - (space.k * dot(space, p.coords, v)) * p.coords;
}

namespace {

// Rescale q onto the quadric <q,q> = 1/k.  The ratio is 1 + O(roundoff)
// for inputs produced by one geodesic step.
Vec renormalize(const ModelSpace& space, const Vec& q) {
  const double target = 1.0 / space.k;
  const double actual = dot(space, q, q);
  if (actual == 0.0 || actual * target <= 0.0)
    throw DomainError("renormalize: point left the quadric");
  return q * std::sqrt(target / actual);
}

}  // namespace

Point exp_map(const ModelSpace& space, const Tangent& v) {
  if (space.k == 0.0) return Point{v.base.coords + v.vec};
  const Vec vt = tangentialize(space, v.base, v.vec);
  const double t = norm(space, vt);
  if (t < kTinyLength) return Point{renormalize(space, v.base.coords)};
  if (space.k > 0.0 && t >= kPi / std::sqrt(space.k))
    throw DomainError("exp_map: |v| exceeds the injectivity radius");
  const Vec u = vt / t;
  return Point{renormalize(space,
                           cs(space.k, t) * v.base.coords + sn(space.k, t) * u)};
}

double distance(const ModelSpace& space, const Point& p, const Point& q) {
  if (space.k == 0.0) return (q.coords - p.coords).norm();
  const double c = space.k * dot(space, p.coords, q.coords);
  if (space.k > 0.0) {
    return std::acos(std::clamp(c, -1.0, 1.0)) / std::sqrt(space.k);
  }
  return std::acosh(std::max(c, 1.0)) / std::sqrt(-space.k);
}

Tangent log_map(const ModelSpace& space, const Point& from, const Point& to) {
  if (space.k == 0.0) return Tangent{from, to.coords - from.coords};
  const double d = distance(space, from, to);
  if (d < kTinyLength)
    return Tangent{from, Vec::Zero(space.ambient_dim())};
  if (space.k > 0.0 && d >= kPi / std::sqrt(space.k) - 1e-9)
    throw AntipodalError("log_map: points are antipodal");
  Vec u = (to.coords - cs(space.k, d) * from.coords) / sn(space.k, d);
  u = tangentialize(space, from, u);
  const double un = norm(space, u);
  if (un < kTinyLength)
    return Tangent{from, Vec::Zero(space.ambient_dim())};
  return Tangent{from, (d / un) * u};
}

namespace {

// Velocity at parameter d of the unit-speed geodesic leaving p along u.
Vec geodesic_velocity(const ModelSpace& space, const Vec& p, const Vec& u,
                      double d) {
  return -space.k * sn(space.k, d) * p + cs(space.k, d) * u;
}

}  // namespace

Tangent parallel_transport(const ModelSpace& space, const Tangent& v,
                           const Point& to) {
  if (space.k == 0.0) return Tangent{to, v.vec};
  const double d = distance(space, v.base, to);
  if (d < kTinyLength) return Tangent{to, tangentialize(space, to, v.vec)};
  const Tangent lg = log_map(space, v.base, to);
  const Vec u = lg.vec / d;
  const double alpha = dot(space, v.vec, u);
  const Vec w = v.vec - alpha * u;
  const Vec g = geodesic_velocity(space, v.base.coords, u, d);
  return Tangent{to, tangentialize(space, to, alpha * g + w)};
}

Tangent mirror_map(const ModelSpace& space, const Point& x, const Point& y,
                   const Tangent& v) {
  const double d = distance(space, x, y);
  if (d < kTinyLength)
    throw CoincidentError("mirror_map: x and y coincide");
  Vec g;  // unit direction of the geodesic x -> y, evaluated at y
  Vec moved;
  if (space.k == 0.0) {
    g = (y.coords - x.coords) / d;
    moved = v.vec;
  } else {
    const Tangent lg = log_map(space, x, y);
    const Vec u = lg.vec / d;
    g = geodesic_velocity(space, x.coords, u, d);
    const double alpha = dot(space, v.vec, u);
    moved = alpha * g + (v.vec - alpha * u);
  }
  const Vec refl = moved - 2.0 * dot(space, moved, g) * g;
  if (space.k == 0.0) return Tangent{y, refl};
  return Tangent{y, tangentialize(space, y, refl)};
}

double index_form_sum(const ModelSpace& space, double rho) {
  if (!(rho > 0.0)) throw DomainError("index_form_sum: rho must be positive");
  if (space.k > 0.0 && rho >= kPi / std::sqrt(space.k))
    throw DomainError("index_form_sum: rho exceeds the diameter");
  return -2.0 * (space.n - 1) * tn(space.k, rho / 2.0);
}

double jacobi_boundary(const ModelSpace& space, double d0, JacobiEnd which,
                       double s) {
  if (!(d0 > 0.0)) throw DomainError("jacobi_boundary: d0 must be positive");
  if (std::abs(s) > d0 / 2.0 + 1e-12)
    throw DomainError("jacobi_boundary: s outside [-d0/2, d0/2]");
  switch (which) {
    case JacobiEnd::left:
    case JacobiEnd::right: {
      const double den = sn(space.k, d0);
      if (std::abs(den) < 1e-13)
        throw PoleError("jacobi_boundary: sn(k, d0) vanishes");
      const double arg = which == JacobiEnd::left ? d0 / 2.0 + s
                                                  : d0 / 2.0 - s;
      return sn(space.k, arg) / den;
    }
    case JacobiEnd::both: {
      const double den = cs(space.k, d0 / 2.0);
      if (std::abs(den) < 1e-13)
        throw PoleError("jacobi_boundary: cs(k, d0/2) vanishes");
      return cs(space.k, s) / den;
    }
  }
  throw DomainError("jacobi_boundary: bad end selector");
}

Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxAmbient,
              kMaxAmbient>
adapted_frame(const ModelSpace& space, const Point& p, const Vec& along) {
  const int m = space.ambient_dim();
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxAmbient,
                kMaxAmbient>
      frame(m, space.n);
  frame.col(space.n - 1) = along;
  int filled = 0;
  for (int axis = 0; axis < m && filled < space.n - 1; ++axis) {
    Vec w = Vec::Zero(m);
    w[axis] = 1.0;
    w = tangentialize(space, p, w);
    w -= dot(space, w, along) * along;
    for (int j = 0; j < filled; ++j)
      w -= dot(space, w, Vec(frame.col(j))) * Vec(frame.col(j));
    const double nn = dot(space, w, w);
    if (nn > 1e-10) frame.col(filled++) = w / std::sqrt(nn);
  }
  if (filled != space.n - 1)
    throw DegenerateError("adapted_frame: could not complete the frame");
  return frame;
}

}  // namespace gaplab::geom

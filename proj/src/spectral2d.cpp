#include "gaplab/spectral2d.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>

#include "gaplab/special.hpp"

namespace gaplab::spectral2d {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kStandoffFrac = 1e-4;

// integral of sn_k over [a, b]
double cell_mass(double k, double a, double b) {
  if (k == 0.0) return 0.5 * (b * b - a * a);
  return (geom::cs(k, a) - geom::cs(k, b)) / k;
}

geom::Vec center_axis(const geom::ModelSpace& space, int i) {
  // tangent basis at the canonical center: spatial axes (k < 0 stores the
  // timelike coordinate first, k > 0 the polar coordinate last)
  geom::Vec v = geom::Vec::Zero(space.ambient_dim());
  v[space.k < 0.0 ? i + 1 : i] = 1.0;
  return v;
}

}  // namespace

BallDomain::BallDomain(geom::ModelSpace space_, double R_, Potential V_)
    : space(space_), R(R_), V(std::move(V_)) {
  if (space.n != 2) throw DomainError("BallDomain: ambient space must have n = 2");
  if (!(R > 0.0)) throw DomainError("BallDomain: radius must be positive");
  if (space.k > 0.0 && 2.0 * R > kPi / std::sqrt(space.k))
    throw DomainError("BallDomain: diameter exceeds pi/sqrt(k)");
}

RadialOperator radial_operator(const BallDomain& dom, int m, int gridsize) {
  if (m < 0 || m > 3)
    throw DomainError("radial_operator: sector index must lie in [0, 3]");
  if (gridsize < 33) throw DomainError("radial_operator: gridsize must be >= 33");
  const int G = gridsize;
  const double h = dom.R / (G - 1);
  const double k = dom.space.k;

  // unknowns: nodes j0 .. G-2 where j0 = 0 for the flux-free center row of
  // the m = 0 sector and j0 = 1 (Dirichlet at the pole) otherwise
  const int j0 = (m == 0) ? 0 : 1;
  const int cnt = G - 1 - j0;

  RadialOperator op;
  op.m = m;
  op.r = Eigen::ArrayXd(cnt);
  op.mass = Eigen::ArrayXd(cnt);
  op.sym.diag = Eigen::ArrayXd(cnt);
  op.sym.off = Eigen::ArrayXd(cnt - 1);

  for (int i = 0; i < cnt; ++i) {
    const int j = j0 + i;
    const double rj = j * h;
    const double a = (j == 0) ? 0.0 : rj - 0.5 * h;
    op.r[i] = rj;
    op.mass[i] = cell_mass(k, a, rj + 0.5 * h);
  }
  for (int i = 0; i < cnt; ++i) {
    const int j = j0 + i;
    const double rj = j * h;
    const double wl = geom::sn(k, rj - 0.5 * h);  // sn(−h/2) < 0 only at j=0
    const double wr = geom::sn(k, rj + 0.5 * h);
    double diag = ((j == 0 ? 0.0 : wl) + wr) / (h * op.mass[i]);
    if (m > 0) {
      const double s = geom::sn(k, rj);
      diag += static_cast<double>(m) * m / (s * s);
    }
    diag += dom.V.value(rj);
    op.sym.diag[i] = diag;
    if (i + 1 < cnt)
      op.sym.off[i] = -wr / (h * std::sqrt(op.mass[i] * op.mass[i + 1]));
  }
  return op;
}

OmegaPrimeEvaluator::OmegaPrimeEvaluator(double R, const Eigen::ArrayXd& r,
                                         const Eigen::ArrayXd& u0)
    : R_(R) {
  // u0 is smooth through the wall with nonvanishing slope there, so the
  // ratio S'/u0 from its own spline stays accurate where differencing
  // log u0 would not; the wall knot is the exact simple-zero limit.
  const int G = static_cast<int>(r.size());
  const CubicSpline S(r, u0);
  Eigen::ArrayXd x(G), g(G);
  for (int j = 0; j + 1 < G; ++j) {
    x[j] = r[j];
    g[j] = (R - r[j]) * S.deriv(r[j]) / u0[j];
  }
  x[G - 1] = R;
  g[G - 1] = -1.0;
  g_ = CubicSpline(std::move(x), std::move(g));
}

double OmegaPrimeEvaluator::at(double r) const {
  if (!(r >= 0.0) || r >= R_)
    throw DomainError("OmegaPrimeEvaluator: r outside [0, R)");
  return g_.value(r) / (R_ - r);
}

BallSpectrum solve_ball(const BallDomain& dom, int gridsize) {
  const int Gc = gridsize, Gf = 2 * gridsize - 1;

  const RadialOperator c0 = radial_operator(dom, 0, Gc);
  const RadialOperator c1 = radial_operator(dom, 1, Gc);
  const RadialOperator f0 = radial_operator(dom, 0, Gf);
  const RadialOperator f1 = radial_operator(dom, 1, Gf);

  const double l1c = tridiag_eigenvalue(c0.sym, 0);
  const double l2rc = tridiag_eigenvalue(c0.sym, 1);
  const double l2ac = tridiag_eigenvalue(c1.sym, 0);
  const double l1f = tridiag_eigenvalue(f0.sym, 0);
  const double l2rf = tridiag_eigenvalue(f0.sym, 1);
  const double l2af = tridiag_eigenvalue(f1.sym, 0);

  BallSpectrum spec;
  spec.lambda1 = (4.0 * l1f - l1c) / 3.0;
  const double l2r = (4.0 * l2rf - l2rc) / 3.0;
  const double l2a = (4.0 * l2af - l2ac) / 3.0;
  spec.mode2 = (l2r < l2a - 1e-10) ? Mode2::radial : Mode2::angular;
  spec.lambda2 = (spec.mode2 == Mode2::radial) ? l2r : l2a;
  spec.lambda1_grid = l1f;
  spec.lambda2_grid = (spec.mode2 == Mode2::radial) ? l2rf : l2af;
  if (!(spec.lambda2 > spec.lambda1))
    throw DegenerateError("solve_ball: lambda2 does not exceed lambda1");

  const Eigen::VectorXd z = tridiag_eigenvector(f0.sym, l1f);
  const double h = dom.R / (Gf - 1);
  spec.r = Eigen::ArrayXd::LinSpaced(Gf, 0.0, dom.R);
  spec.u0 = Eigen::ArrayXd::Zero(Gf);
  for (int j = 0; j + 1 < Gf; ++j) spec.u0[j] = z[j] / std::sqrt(f0.mass[j]);

  double amax = 0.0;
  for (int j = 0; j < Gf; ++j)
    if (std::abs(spec.u0[j]) > std::abs(amax)) amax = spec.u0[j];
  spec.u0 /= amax;

  spec.omega_prime = Eigen::ArrayXd::Constant(Gf, kNaN);
  spec.omega_prime[0] = 0.0;  // radial symmetry at the pole
  Eigen::ArrayXd L(Gf);
  for (int j = 0; j + 1 < Gf; ++j) L[j] = std::log(spec.u0[j]);
  for (int j = 1; j + 2 < Gf; ++j)
    spec.omega_prime[j] = (L[j + 1] - L[j - 1]) / (2.0 * h);
  spec.omega_prime[Gf - 2] =
      (3.0 * L[Gf - 2] - 4.0 * L[Gf - 3] + L[Gf - 4]) / (2.0 * h);

  spec.omega = OmegaPrimeEvaluator(dom.R, spec.r, spec.u0);
  return spec;
}

geom::Tangent grad_log_phi1(const BallSpectrum& spec, const BallDomain& dom,
                            const geom::Point& p) {
  const geom::Point c = dom.center();
  const double rp = geom::distance(dom.space, c, p);
  if (rp >= dom.R * (1.0 - kStandoffFrac))
    throw BoundaryError("grad_log_phi1: point inside the wall standoff");
  if (rp < 1e-12)
    return geom::Tangent{p, geom::Vec::Zero(dom.space.ambient_dim())};
  const geom::Vec radial = -geom::log_map(dom.space, p, c).vec / rp;
  return geom::Tangent{p, spec.omega.at(rp) * radial};
}

geom::Point sample_ball_point(const BallDomain& dom, rng::Stream& st) {
  const double k = dom.space.k;
  const double reff = dom.R * (1.0 - kStandoffFrac);
  double peak = geom::sn(k, reff);
  if (k > 0.0) {
    const double rmax = 0.5 * kPi / std::sqrt(k);
    if (reff > rmax) peak = geom::sn(k, rmax);
  }
  double r = 0.0;
  for (;;) {
    r = st.next_uniform() * reff;
    if (st.next_uniform() * peak <= geom::sn(k, r)) break;
  }
  const double theta = 2.0 * kPi * st.next_uniform();
  const geom::Point c = dom.center();
  const geom::Vec dir = std::cos(theta) * center_axis(dom.space, 0) +
                        std::sin(theta) * center_axis(dom.space, 1);
  return geom::exp_map(dom.space, geom::Tangent{c, r * dir});
}

double condition_margin(const BallDomain& dom, const BallSpectrum& ball,
                        const spectral1d::Model1D& model,
                        const spectral1d::Spectrum1D& spec1d,
                        const geom::Point& x, const geom::Point& y) {
  if (dom.space.k == 0.0) return 0.0;
  const geom::Point c = dom.center();
  const double rho = geom::distance(dom.space, x, y);
  const double bracket =
      (2.0 * ball.lambda1 - dom.V.value(geom::distance(dom.space, c, x)) -
       dom.V.value(geom::distance(dom.space, c, y))) -
      2.0 * (spec1d.lambda1 - model.vtilde.value(0.5 * rho));
  return geom::tn(dom.space.k, 0.5 * rho) * bracket;
}

double modulus_delta(const BallDomain& dom, const BallSpectrum& ball,
                     const spectral1d::PsiEvaluator& psi, const geom::Point& x,
                     const geom::Point& y) {
  const double rho = geom::distance(dom.space, x, y);
  const geom::Vec gx = grad_log_phi1(ball, dom, x).vec;
  const geom::Vec gy = grad_log_phi1(ball, dom, y).vec;
  const geom::Vec tx = geom::log_map(dom.space, x, y).vec / rho;
  const geom::Vec ty = -geom::log_map(dom.space, y, x).vec / rho;
  return geom::dot(dom.space, gy, ty) - geom::dot(dom.space, gx, tx) -
         2.0 * psi.at(0.5 * rho);
}

namespace {

template <typename Fn>
void for_each_pair(const BallDomain& dom, int samples, std::uint64_t seed,
                   const Fn& fn) {
  for (int i = 0; i < samples; ++i) {
    rng::Stream st(seed, static_cast<std::uint64_t>(i), 0, rng::kDomainSampler);
    geom::Point x = sample_ball_point(dom, st);
    geom::Point y = sample_ball_point(dom, st);
    while (geom::distance(dom.space, x, y) < 1e-9)
      y = sample_ball_point(dom, st);
    fn(x, y);
  }
}

}  // namespace

ConditionReport check_condition(const BallDomain& dom,
                                const BallSpectrum& ball,
                                const spectral1d::Model1D& model,
                                const spectral1d::Spectrum1D& spec1d,
                                int samples, std::uint64_t seed) {
  ConditionReport rep;
  rep.samples = samples;
  rep.seed = seed;
  rep.min_margin = std::numeric_limits<double>::infinity();
  for_each_pair(dom, samples, seed,
                [&](const geom::Point& x, const geom::Point& y) {
                  const double m = condition_margin(dom, ball, model, spec1d, x, y);
                  if (m < rep.min_margin) {
                    rep.min_margin = m;
                    rep.worst_x = x;
                    rep.worst_y = y;
                  }
                });
  return rep;
}

ModulusReport check_modulus_concavity(const BallDomain& dom,
                                      const BallSpectrum& ball,
                                      const spectral1d::Model1D& model,
                                      const spectral1d::Spectrum1D& spec1d,
                                      int samples, std::uint64_t seed) {
  const spectral1d::PsiEvaluator psi(model, spec1d);
  ModulusReport rep;
  rep.samples = samples;
  rep.seed = seed;
  rep.max_delta = -std::numeric_limits<double>::infinity();
  for_each_pair(dom, samples, seed,
                [&](const geom::Point& x, const geom::Point& y) {
                  const double d = modulus_delta(dom, ball, psi, x, y);
                  if (d > rep.max_delta) {
                    rep.max_delta = d;
                    rep.worst_x = x;
                    rep.worst_y = y;
                  }
                });
  return rep;
}

GapReport check_gap_comparison(const BallDomain& dom, const BallSpectrum& ball,
                               const spectral1d::Spectrum1D& spec1d) {
  (void)dom;
  GapReport rep;
  rep.gap_ball = ball.lambda2 - ball.lambda1;
  rep.gap_model = spec1d.lambda2 - spec1d.lambda1;
  rep.margin = rep.gap_ball - rep.gap_model;
  return rep;
}

namespace {
std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
}  // namespace

void export_csv(const BallDomain& dom, const BallSpectrum& spec,
                std::ostream& out) {
  out << "# k=" << fmt17(dom.space.k) << " R=" << fmt17(dom.R)
      << " lambda1=" << fmt17(spec.lambda1)
      << " lambda2=" << fmt17(spec.lambda2) << " mode2="
      << (spec.mode2 == Mode2::angular ? "angular" : "radial") << "\n";
  out << "r,u0,omegaPrime\n";
  for (int j = 0; j < spec.r.size(); ++j)
    out << fmt17(spec.r[j]) << ',' << fmt17(spec.u0[j]) << ','
        << fmt17(spec.omega_prime[j]) << "\n";
}

}  // namespace gaplab::spectral2d

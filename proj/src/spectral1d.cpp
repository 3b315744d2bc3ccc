#include "gaplab/spectral1d.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>

#include "gaplab/special.hpp"

namespace gaplab::spectral1d {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}  // namespace

Model1D::Model1D(int n_, double k_, double D_, Potential vtilde_)
    : n(n_), k(k_), D(D_), vtilde(std::move(vtilde_)) {
  if (n < 2) throw DomainError("Model1D: n must be >= 2");
  if (!(D > 0.0)) throw DomainError("Model1D: D must be positive");
  if (k > 0.0 && D > kPi / std::sqrt(k) - 1e-9)
    throw DomainError(
        "Model1D: for k > 0 the interval must satisfy D < pi/sqrt(k)");
  if (!vtilde.is_even())
    throw DomainError("Model1D: potential must be even in s");
}

double Model1D::weight(double s) const {
  return std::pow(geom::cs(k, s), n - 1);
}

SymTridiag assemble(const Model1D& model, int gridsize) {
  if (gridsize < 33 || gridsize % 2 == 0)
    throw DomainError("assemble: gridsize must be odd and >= 33");
  const int G = gridsize;
  const double h = model.D / (G - 1);
  const auto s_at = [&](double j) { return -model.D / 2.0 + j * h; };

  const int m = G - 2;
  SymTridiag T{Eigen::ArrayXd(m), Eigen::ArrayXd(m - 1)};
  Eigen::ArrayXd w(G), whalf(G - 1);
  for (int j = 0; j < G; ++j) w[j] = model.weight(s_at(j));
  for (int j = 0; j + 1 < G; ++j) whalf[j] = model.weight(s_at(j + 0.5));

  for (int i = 0; i < m; ++i) {
    const int j = i + 1;
    T.diag[i] = (whalf[j - 1] + whalf[j]) / (h * h * w[j]) +
                model.vtilde.value(s_at(j));
    if (i + 1 < m)
      T.off[i] = -whalf[j] / (h * h * std::sqrt(w[j] * w[j + 1]));
  }
  return T;
}

Spectrum1D solve_spectrum(const Model1D& model, int gridsize) {
  const SymTridiag T = assemble(model, gridsize);
  const int G = gridsize;
  const int m = G - 2;
  const double h = model.D / (G - 1);

  Spectrum1D spec;
  spec.s = Eigen::ArrayXd::LinSpaced(G, -model.D / 2.0, model.D / 2.0);
  spec.lambda1 = spec.lambda1_grid = tridiag_eigenvalue(T, 0);
  spec.lambda2 = spec.lambda2_grid = tridiag_eigenvalue(T, 1);
  if (!(spec.lambda2 > spec.lambda1))
    throw DegenerateError("solve_spectrum: lowest eigenvalues not separated");

  const Eigen::VectorXd z1 = tridiag_eigenvector(T, spec.lambda1);
  const Eigen::VectorXd z2 = tridiag_eigenvector(T, spec.lambda2, &z1);

  spec.phi1 = Eigen::ArrayXd::Zero(G);
  spec.phi2 = Eigen::ArrayXd::Zero(G);
  for (int i = 0; i < m; ++i) {
    const double rw = std::sqrt(model.weight(spec.s[i + 1]));
    spec.phi1[i + 1] = z1[i] / rw;
    spec.phi2[i + 1] = z2[i] / rw;
  }

  // phi1 positive with max 1
  double amax = 0.0;
  for (int j = 0; j < G; ++j)
    if (std::abs(spec.phi1[j]) > std::abs(amax)) amax = spec.phi1[j];
  spec.phi1 /= amax;

  // phi2 max-norm 1 with positive slope at the center
  double bmax = 0.0;
  for (int j = 0; j < G; ++j)
    if (std::abs(spec.phi2[j]) > std::abs(bmax)) bmax = std::abs(spec.phi2[j]);
  spec.phi2 /= bmax;
  const int c = (G - 1) / 2;
  if (spec.phi2[c + 1] - spec.phi2[c - 1] < 0.0) spec.phi2 = -spec.phi2;

  // psi = (log phi1)': centered inside, one-sided second order at the
  // penultimate nodes, undefined at the walls
  spec.psi = Eigen::ArrayXd::Constant(G, kNaN);
  Eigen::ArrayXd L(G);
  for (int j = 1; j + 1 < G; ++j) L[j] = std::log(spec.phi1[j]);
  for (int j = 2; j + 2 < G; ++j)
    spec.psi[j] = (L[j + 1] - L[j - 1]) / (2.0 * h);
  spec.psi[1] = (-3.0 * L[1] + 4.0 * L[2] - L[3]) / (2.0 * h);
  spec.psi[G - 2] = (3.0 * L[G - 2] - 4.0 * L[G - 3] + L[G - 4]) / (2.0 * h);

  // phi_ratio with endpoint limits from one-sided derivatives
  spec.phi_ratio = Eigen::ArrayXd::Zero(G);
  for (int j = 1; j + 1 < G; ++j)
    spec.phi_ratio[j] = spec.phi2[j] / spec.phi1[j];
  spec.phi_ratio[0] = (4.0 * spec.phi2[1] - spec.phi2[2]) /
                      (4.0 * spec.phi1[1] - spec.phi1[2]);
  spec.phi_ratio[G - 1] = (4.0 * spec.phi2[G - 2] - spec.phi2[G - 3]) /
                          (4.0 * spec.phi1[G - 2] - spec.phi1[G - 3]);
  return spec;
}

Spectrum1D solve_richardson(const Model1D& model, int gridsize) {
  const Spectrum1D coarse = solve_spectrum(model, gridsize);
  Spectrum1D fine = solve_spectrum(model, 2 * gridsize - 1);
  fine.lambda1 = (4.0 * fine.lambda1_grid - coarse.lambda1_grid) / 3.0;
  fine.lambda2 = (4.0 * fine.lambda2_grid - coarse.lambda2_grid) / 3.0;
  return fine;
}

double psi_ode_lhs(const Model1D& model, double s, double psi, double dpsi,
                   double ddpsi, double lambda1, double V, double dV) {
  const double t = geom::tn(model.k, s);
  return ddpsi + 2.0 * dpsi * psi -
         t * ((model.n + 1) * dpsi + 2.0 * lambda1 + 2.0 * psi * psi -
              2.0 * V) -
         dV - (model.n - 1) * (model.k - t * t) * psi;
}

double phi_ode_lhs(const Model1D& model, double s, double phi, double dphi,
                   double ddphi, double psi, double gap) {
  const double t = geom::tn(model.k, s);
  return ddphi - (model.n - 1) * t * dphi + 2.0 * psi * dphi + gap * phi;
}

Eigen::ArrayXd psi_ode_residual(const Model1D& model, const Spectrum1D& spec) {
  const int G = static_cast<int>(spec.s.size());
  const double h = spec.s[1] - spec.s[0];
  Eigen::ArrayXd resid = Eigen::ArrayXd::Constant(G, kNaN);
  Eigen::ArrayXd V(G);
  for (int j = 0; j < G; ++j) V[j] = model.vtilde.value(spec.s[j]);
  for (int j = 2; j + 2 < G; ++j) {
    const double dpsi = (spec.psi[j + 1] - spec.psi[j - 1]) / (2.0 * h);
    const double ddpsi =
        (spec.psi[j + 1] - 2.0 * spec.psi[j] + spec.psi[j - 1]) / (h * h);
    const double dV = (V[j + 1] - V[j - 1]) / (2.0 * h);
    resid[j] = psi_ode_lhs(model, spec.s[j], spec.psi[j], dpsi, ddpsi,
                           spec.lambda1_grid, V[j], dV);
  }
  return resid;
}

Eigen::ArrayXd phi_ode_residual(const Model1D& model, const Spectrum1D& spec) {
  const int G = static_cast<int>(spec.s.size());
  const double h = spec.s[1] - spec.s[0];
  const double gap = spec.lambda2_grid - spec.lambda1_grid;
  Eigen::ArrayXd resid = Eigen::ArrayXd::Constant(G, kNaN);
  for (int j = 2; j + 2 < G; ++j) {
    const double dphi =
        (spec.phi_ratio[j + 1] - spec.phi_ratio[j - 1]) / (2.0 * h);
    const double ddphi = (spec.phi_ratio[j + 1] - 2.0 * spec.phi_ratio[j] +
                          spec.phi_ratio[j - 1]) /
                         (h * h);
    resid[j] = phi_ode_lhs(model, spec.s[j], spec.phi_ratio[j], dphi, ddphi,
                           spec.psi[j], gap);
  }
  return resid;
}

double inner_max(const Model1D& model, const Spectrum1D& spec,
                 const Eigen::ArrayXd& resid, double frac) {
  double best = 0.0;
  for (int j = 0; j < resid.size(); ++j) {
    if (std::isnan(resid[j])) continue;
    if (std::abs(spec.s[j]) > frac * model.D / 2.0) continue;
    best = std::max(best, std::abs(resid[j]));
  }
  return best;
}

PsiEvaluator::PsiEvaluator(const Model1D& model, const Spectrum1D& spec) {
  // Differencing log(phi1) loses accuracy like 1/m^2 at the m-th node from
  // the wall, so the grid psi is not interpolated here.  Instead phi1 gets
  // its own spline (smooth through the wall, slope bounded away from zero)
  // and the knots are (D/2 - s) S'/phi1, anchored by the exact limit -1 at
  // the simple Dirichlet zero.
  const int G = static_cast<int>(spec.s.size());
  const int c = (G - 1) / 2;
  half_ = model.D / 2.0;
  const CubicSpline S(spec.s, spec.phi1);
  const int m = G - 1 - c;  // nodes c .. G-2, then the wall
  Eigen::ArrayXd x(m + 1), q(m + 1);
  for (int j = c; j + 1 < G; ++j) {
    x[j - c] = spec.s[j];
    q[j - c] = (half_ - spec.s[j]) * S.deriv(spec.s[j]) / spec.phi1[j];
  }
  x[m] = half_;
  q[m] = -1.0;
  q_ = CubicSpline(std::move(x), std::move(q));
}

double PsiEvaluator::at(double xi) const {
  if (!(xi >= 0.0) || xi >= half_)
    throw DomainError("PsiEvaluator: xi outside [0, D/2)");
  return q_.value(xi) / (half_ - xi);
}

PhiEvaluator::PhiEvaluator(const Model1D& model, const Spectrum1D& spec) {
  const int G = static_cast<int>(spec.s.size());
  const int c = (G - 1) / 2;
  Eigen::ArrayXd x(G - c), v(G - c);
  for (int j = c; j < G; ++j) {
    x[j - c] = spec.s[j];
    v[j - c] = spec.phi_ratio[j];
  }
  (void)model;
  spline_ = CubicSpline(std::move(x), std::move(v));
}

double PhiEvaluator::at(double xi) const {
  return spline_.value(xi);
}

namespace {
std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
}  // namespace

void export_csv(const Model1D& model, const Spectrum1D& spec,
                std::ostream& out) {
  out << "# n=" << model.n << " k=" << fmt17(model.k)
      << " D=" << fmt17(model.D) << " lambda1bar=" << fmt17(spec.lambda1)
      << " lambda2bar=" << fmt17(spec.lambda2) << "\n";
  out << "s,phi1bar,phi2bar,psi,phiRatio\n";
  for (int j = 0; j < spec.s.size(); ++j) {
    out << fmt17(spec.s[j]) << ',' << fmt17(spec.phi1[j]) << ','
        << fmt17(spec.phi2[j]) << ',' << fmt17(spec.psi[j]) << ','
        << fmt17(spec.phi_ratio[j]) << "\n";
  }
}

}  // namespace gaplab::spectral1d

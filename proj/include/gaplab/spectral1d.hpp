#ifndef GAPLAB_SPECTRAL1D_HPP
#define GAPLAB_SPECTRAL1D_HPP

// One-dimensional comparison eigenproblem
//
//     -u'' + (n-1) tn_k(s) u' + V(s) u = lambda u   on [-D/2, D/2],
//
// Dirichlet ends, even V.  The drift term is absorbed into the weight
// w = cs_k^{n-1}: the operator is -(w u')' / w + V, discretized in flux
// form and symmetrized by similarity with sqrt(w), so the assembled matrix
// is symmetric by construction.

#include <Eigen/Dense>
#include <iosfwd>

#include "gaplab/potential.hpp"
#include "gaplab/tridiag.hpp"

namespace gaplab::spectral1d {

struct Model1D {
  int n;
  double k;
  double D;
  Potential vtilde;

  // Validates n >= 2, 0 < D (and D <= pi/sqrt(k) - 1e-9 for k > 0), and
  // that the potential is even.
  Model1D(int n_, double k_, double D_, Potential vtilde_);

  double weight(double s) const;  // cs_k(s)^(n-1)
};

struct Spectrum1D {
  Eigen::ArrayXd s;           // grid nodes including the Dirichlet ends
  Eigen::ArrayXd phi1, phi2;  // eigenfunctions on s (0 at the ends)
  double lambda1 = 0.0, lambda2 = 0.0;
  // raw same-grid eigenvalues (equal to lambda1/lambda2 unless Richardson
  // extrapolation was applied)
  double lambda1_grid = 0.0, lambda2_grid = 0.0;
  Eigen::ArrayXd psi;        // (log phi1)' ; NaN at the two end nodes
  Eigen::ArrayXd phi_ratio;  // phi2/phi1 with endpoint limits filled in
};

// Symmetrized interior matrix at the given (odd) grid size.
SymTridiag assemble(const Model1D& model, int gridsize);

// Two lowest eigenpairs at one grid.  phi1 is positive with max 1; phi2 has
// positive slope at the center and max-norm 1.
Spectrum1D solve_spectrum(const Model1D& model, int gridsize);

// solve_spectrum on {gridsize, 2*gridsize-1} with Richardson-extrapolated
// eigenvalues; functions live on the fine grid.
Spectrum1D solve_richardson(const Model1D& model, int gridsize = 4097);

// Pointwise defect of the Riccati-type ODE satisfied by psi; NaN where the
// centered stencil does not exist.  Derivatives of psi and V are formed by
// the same central differencing.
Eigen::ArrayXd psi_ode_residual(const Model1D& model, const Spectrum1D& spec);

// Pointwise defect of the eigenvalue-gap ODE satisfied by phi_ratio.
Eigen::ArrayXd phi_ode_residual(const Model1D& model, const Spectrum1D& spec);

// The same defects with caller-supplied derivatives (used to check closed
// forms without finite differencing).
double psi_ode_lhs(const Model1D& model, double s, double psi, double dpsi,
                   double ddpsi, double lambda1, double V, double dV);
double phi_ode_lhs(const Model1D& model, double s, double phi, double dphi,
                   double ddphi, double psi, double gap);

// max-norm of a residual array restricted to |s| <= frac * D/2
double inner_max(const Model1D& model, const Spectrum1D& spec,
                 const Eigen::ArrayXd& resid, double frac);

// Evaluators consumed by the checkers and the coupling drift.  Psi carries
// the simple pole at D/2 explicitly: the spline interpolates
// (D/2 - s) psi(s), which tends to -1 at the wall.
class PsiEvaluator {
 public:
  PsiEvaluator() = default;
  PsiEvaluator(const Model1D& model, const Spectrum1D& spec);
  double at(double xi) const;  // xi in [0, D/2)
 private:
  CubicSpline q_;
  double half_ = 0.0;
};

class PhiEvaluator {
 public:
  PhiEvaluator() = default;
  PhiEvaluator(const Model1D& model, const Spectrum1D& spec);
  double at(double xi) const;  // xi in [0, D/2]
  double x_max() const { return spline_.x_max(); }
 private:
  CubicSpline spline_;
};

// Columns s, phi1bar, phi2bar, psi, phiRatio after one metadata line.
void export_csv(const Model1D& model, const Spectrum1D& spec,
                std::ostream& out);

}  // namespace gaplab::spectral1d

#endif

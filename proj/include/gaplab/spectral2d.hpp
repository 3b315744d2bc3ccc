#ifndef GAPLAB_SPECTRAL2D_HPP
#define GAPLAB_SPECTRAL2D_HPP

// Dirichlet eigenpairs of -Laplace + V on geodesic balls in the 2-D space
// forms, with V radial.  Separation in geodesic polar coordinates reduces
// every angular sector m to a radial problem
//
//     -u'' - (cs_k/sn_k)(r) u' + (m^2/sn_k(r)^2 + V(r)) u = lambda u
//
// on (0, R], Dirichlet at R, natural at 0 (zero flux for m = 0, u(0) = 0
// otherwise).  lambda1 is the m=0 ground value; lambda2 competes between
// the second m=0 value and the first m=1 value.  Higher sectors never win
// on these domains.  The module also hosts the three inequality checkers
// that consume both this spectrum and the 1-D comparison spectrum.

#include <cstdint>
#include <iosfwd>

#include <Eigen/Dense>

#include "gaplab/geom.hpp"
#include "gaplab/potential.hpp"
#include "gaplab/rng.hpp"
#include "gaplab/spectral1d.hpp"
#include "gaplab/tridiag.hpp"

namespace gaplab::spectral2d {

struct BallDomain {
  geom::ModelSpace space;  // n = 2
  double R;
  Potential V;  // radial, evaluated on [0, R]

  // Validates n = 2, R > 0 and (k > 0) 2R <= pi/sqrt(k): the closed bound
  // admits the hemisphere, whose eigenpairs are regular even though the
  // derived 1-D interval is then clamped slightly below pi by the caller.
  BallDomain(geom::ModelSpace space_, double R_, Potential V_);

  geom::Point center() const { return geom::base_point(space); }
};

enum class Mode2 { radial, angular };

// One angular sector in flux form, symmetrized by similarity with the
// square roots of the cell masses of sn_k(r) dr; u_j = z_j / sqrt(mass_j).
struct RadialOperator {
  SymTridiag sym;
  Eigen::ArrayXd r;     // unknown locations: from 0 for m=0, from h for m>=1
  Eigen::ArrayXd mass;  // exact cell masses, (cs_k(a)-cs_k(b))/k per cell
  int m = 0;
};

// m <= 3 enforced; gridsize >= 33 counts the nodes of [0, R] including
// both ends.
RadialOperator radial_operator(const BallDomain& dom, int m, int gridsize);

// (log u0)'(r) on [0, R) with the simple pole at the wall factored out:
// the spline carries (R - r) (log u0)', anchored to the exact limit -1.
class OmegaPrimeEvaluator {
 public:
  OmegaPrimeEvaluator() = default;
  OmegaPrimeEvaluator(double R, const Eigen::ArrayXd& r,
                      const Eigen::ArrayXd& u0);
  double at(double r) const;  // r in [0, R)
 private:
  CubicSpline g_;
  double R_ = 0.0;
};

struct BallSpectrum {
  double lambda1 = 0.0, lambda2 = 0.0;
  Mode2 mode2 = Mode2::angular;
  // raw fine-grid values behind the Richardson-extrapolated pair above
  double lambda1_grid = 0.0, lambda2_grid = 0.0;
  Eigen::ArrayXd r;            // full node set, 0 .. R
  Eigen::ArrayXd u0;           // radial phi1 profile, positive, max 1
  Eigen::ArrayXd omega_prime;  // (log u0)': 0 at r=0, NaN at the wall
  OmegaPrimeEvaluator omega;
};

// Solves sectors m=0,1 on {gridsize, 2*gridsize-1} grids with Richardson
// eigenvalues.  Ties between the sectors at lambda2 (within 1e-10) resolve
// to angular so reports are deterministic.
BallSpectrum solve_ball(const BallDomain& dom, int gridsize = 4097);

// omega'(r_p) times the unit radial tangent at p.  Throws BoundaryError
// within the standoff r_p >= R (1 - 1e-4); the stepper treats that as a
// wall proposal.  Zero vector at the center.
geom::Tangent grad_log_phi1(const BallSpectrum& spec, const BallDomain& dom,
                            const geom::Point& p);

// Uniform draw from the ball interior (area element sn_k(r) dr dtheta) by
// rejection, kept outside the drift standoff.
geom::Point sample_ball_point(const BallDomain& dom, rng::Stream& st);

// tn_k(rho/2) * [(2 lambda1 - V(x) - V(y)) - 2(lambda1bar - Vtilde(rho/2))];
// identically zero when k = 0.
double condition_margin(const BallDomain& dom, const BallSpectrum& ball,
                        const spectral1d::Model1D& model,
                        const spectral1d::Spectrum1D& spec1d,
                        const geom::Point& x, const geom::Point& y);

// <grad log phi1(y), gamma'(y)> - <grad log phi1(x), gamma'(x)>
//   - 2 psi(rho/2),  gamma the unit-speed geodesic from x to y.
double modulus_delta(const BallDomain& dom, const BallSpectrum& ball,
                     const spectral1d::PsiEvaluator& psi, const geom::Point& x,
                     const geom::Point& y);

struct ConditionReport {
  double min_margin = 0.0;
  geom::Point worst_x, worst_y;
  int samples = 0;
  std::uint64_t seed = 0;
};

struct ModulusReport {
  double max_delta = 0.0;
  geom::Point worst_x, worst_y;
  int samples = 0;
  std::uint64_t seed = 0;
};

struct GapReport {
  double margin = 0.0;
  double gap_ball = 0.0;
  double gap_model = 0.0;
};

// Pair-sampled checkers.  A violation is recorded in the report, never
// thrown; each pair draws from its own stream keyed by (seed, pair index),
// and the min/max reductions make the result order independent.
ConditionReport check_condition(const BallDomain& dom,
                                const BallSpectrum& ball,
                                const spectral1d::Model1D& model,
                                const spectral1d::Spectrum1D& spec1d,
                                int samples, std::uint64_t seed);

ModulusReport check_modulus_concavity(const BallDomain& dom,
                                      const BallSpectrum& ball,
                                      const spectral1d::Model1D& model,
                                      const spectral1d::Spectrum1D& spec1d,
                                      int samples, std::uint64_t seed);

GapReport check_gap_comparison(const BallDomain& dom, const BallSpectrum& ball,
                               const spectral1d::Spectrum1D& spec1d);

// Columns r, u0, omegaPrime after one metadata line.
void export_csv(const BallDomain& dom, const BallSpectrum& spec,
                std::ostream& out);

}  // namespace gaplab::spectral2d

#endif

#ifndef GAPLAB_COUPLING_HPP
#define GAPLAB_COUPLING_HPP

// Reflection-coupled diffusion pairs on geodesic balls.  Each marginal is
// the ground-state h-transform: Brownian motion with drift 2 grad log phi1,
// killed nowhere (the drift confines it).  The two modes differ by the
// extra curvature drift +-2 tn_k(rho/2) along the connecting geodesic; the
// modified pair contracts no slower than the standard one when k >= 0 and
// no faster when k < 0, which is the pathwise content of the gap estimate.
//
// Stepping is tangent-space Euler with exponential retraction.  One base
// step consumes one n-dimensional standard normal draw; proposals that
// leave the ball (or overrun the k > 0 injectivity radius) halve dt and
// rescale the same draw, so a trajectory is a deterministic function of
// (seed, trajectory index).

#include <cstdint>
#include <limits>
#include <vector>

#include "gaplab/geom.hpp"
#include "gaplab/rng.hpp"
#include "gaplab/spectral1d.hpp"
#include "gaplab/spectral2d.hpp"

namespace gaplab::coupling {

enum class Mode { standard, modified };

struct CoupledPair {
  geom::Point x, y;
  Mode mode = Mode::standard;
  bool coupled = false;
  double t = 0.0;
};

struct SimConfig {
  double dt = 1e-4;
  double T = 1.0;
  double eps_couple = 0.0;  // <= 0: defaults to 1e-3 * R
  int trajectories = 1;
  std::uint64_t seed = 0;
  int max_halvings = 20;
  std::vector<double> obs_times;  // ascending, within [0, T]
  int threads = 0;                // 0: one worker per hardware thread
};

// Drift tangents at (x, y) of an uncoupled pair.  Inside the wall standoff
// the radial log-derivative switches to its simple-pole form -1/(R - r);
// outside the closed ball it is a stepper bug and throws BoundaryError.
std::pair<geom::Tangent, geom::Tangent> drift(
    const CoupledPair& pair, const spectral2d::BallSpectrum& ball,
    const spectral2d::BallDomain& dom);

struct StepOutcome {
  CoupledPair pair;
  int halvings = 0;    // spent inside this base step
  bool rejected = false;  // positions kept, clock advanced by the full dt
  double advanced = 0.0;
};

// One base step.  `noise` holds n independent standard normals, realized
// through a frame at x whose last column is the unit tangent toward y; y
// receives the mirror image of the same ambient increment, evaluated at the
// pre-step positions.  Pairs closer than eps_couple after the move merge at
// the geodesic midpoint (eps_couple <= 0 disables merging).  A merged pair
// only advances its clock.
StepOutcome step(const CoupledPair& pair, double dt, const geom::Vec& noise,
                 const spectral2d::BallSpectrum& ball,
                 const spectral2d::BallDomain& dom, double eps_couple,
                 int max_halvings);

// <grad log phi1(y), gamma'(y)> - <grad log phi1(x), gamma'(x)> along the
// unit geodesic from x to y; the drift difference felt by rho.
double pair_f(const spectral2d::BallSpectrum& ball,
              const spectral2d::BallDomain& dom, const geom::Point& x,
              const geom::Point& y);

// Generator of pair_f under the modified coupling, assembled in the
// parallel frame adapted to the connecting geodesic: potential difference,
// the (n-1)(k - tn^2) and 2 tn_k(rho/2) radial blocks, and the transverse
// quadratic over sn_k(rho).
double f_drift_closed_form(const spectral2d::BallDomain& dom,
                           const spectral2d::BallSpectrum& ball,
                           const geom::Point& x, const geom::Point& y);

struct Observation {
  double t = 0.0;
  double xi = 0.0;   // half the pair distance; 0 from the merge on
  double f = 0.0;    // pair_f, NaN outside rho in (eps, 2R - eps)
  double phi = 0.0;  // 1-D ratio profile at xi when an evaluator is given
};

struct TrajectoryStats {
  double tau = std::numeric_limits<double>::infinity();
  std::vector<Observation> samples;  // one per requested time
  long boundary_halvings = 0;
  long rejected_steps = 0;
};

// Runs one pair to min(tau, T), recording at config.obs_times (base steps
// shorten to land on them exactly).  Throws StuckError after
// config.max_halvings consecutive fully rejected steps.
TrajectoryStats simulate(const CoupledPair& pair0, const SimConfig& config,
                         const spectral2d::BallSpectrum& ball,
                         const spectral2d::BallDomain& dom,
                         const spectral1d::PhiEvaluator* phi = nullptr,
                         std::uint64_t traj_index = 0);

struct FractionRecord {
  int trajectories = 0;
  int coupled = 0;
  double fraction = 0.0;
  double mean_tau = 0.0;  // over the coupled paths
  long boundary_halvings = 0;
  long rejected_steps = 0;
  int stuck = 0;  // trajectories abandoned by StuckError
};

// Ensemble of config.trajectories pairs from the same start.
FractionRecord coupling_fraction(const CoupledPair& pair0,
                                 const SimConfig& config,
                                 const spectral2d::BallSpectrum& ball,
                                 const spectral2d::BallDomain& dom);

struct CompareRecord {
  int paths = 0;
  long total_steps = 0;
  long violating_steps = 0;   // ordered-gap breaches beyond tol_path
  double min_ordered_gap = 0.0;  // most negative is the worst breach
  int tau_violations = 0;     // lagging pair merged strictly first
  int lead_coupled = 0;       // paths where the leading pair merged by T
  double sign = 1.0;          // +1: rho_std - rho_mod ordered, -1 reversed
};

// Standard and modified pair distances from the same start, driven by one
// shared noise stream.  A reflection-coupled driver pair supplies the drift
// functional F_t and the Brownian scalar along the pair axis; rho_std and
// rho_mod advance as scalar Euler companions whose drifts differ only by
// the sign-definite -4 tn_k(rho/2) term, so the ordering holds step by
// step.  For k >= 0 the modified distance leads (rho_mod <= rho_std), for
// k < 0 the standard one does; `sign` records which ordering was asserted.
CompareRecord shared_noise_compare(const CoupledPair& pair0,
                                   const SimConfig& config,
                                   const spectral2d::BallSpectrum& ball,
                                   const spectral2d::BallDomain& dom,
                                   double tol_path);

struct SuperRecord {
  struct At {
    double t = 0.0;
    double mean = 0.0;   // ensemble average of the ratio profile at xi_t
    double se = 0.0;
    double bound = 0.0;  // exp(-gap t) phi0 (1 + 3 se_rel)
    int uncoupled = 0;
    bool pass = false;
  };
  std::vector<At> at;
  double phi0 = 0.0;
  double gap_model = 0.0;
  double fitted_rate = 0.0;  // least-squares slope of -log mean against t
  bool pass = false;
};

// Supermartingale bound E Phi(xi_t) <= exp(-gap t) Phi(xi_0) for the
// standard coupling, with the 1-D ratio profile as the test function.
// Throws InsufficientSamplesError when fewer than 100 paths remain
// uncoupled at a requested time.
SuperRecord supermartingale_check(const CoupledPair& pair0,
                                  const SimConfig& config,
                                  const spectral2d::BallSpectrum& ball,
                                  const spectral2d::BallDomain& dom,
                                  const spectral1d::Model1D& model,
                                  const spectral1d::Spectrum1D& spec1d);

struct FkRecord {
  struct At {
    double t = 0.0;
    double estimate = 0.0;  // ensemble average of v0(X_t)
    double se = 0.0;
    double reference = 0.0;  // exp(-gap t) v0(x0)
    bool pass = false;
  };
  std::vector<At> at;
  double gap = 0.0;
  double v0 = 0.0;
  bool pass = false;
};

// Single h-process started at x0 on the k > 0 hemisphere, observable
// v0 = phi2/phi1 = sqrt(k) times the first ambient coordinate; its
// expectation decays at exactly the spectral gap.
FkRecord feynman_kac_check(const geom::Point& x0, const SimConfig& config,
                           const spectral2d::BallSpectrum& ball,
                           const spectral2d::BallDomain& dom);

struct GenRhoRecord {
  double drift_est = 0.0, drift_se = 0.0, drift_ref = 0.0;
  double qv_est = 0.0, qv_se = 0.0, qv_ref = 8.0;
  int samples = 0;
  bool pass_drift = false, pass_qv = false;
};

// One-step generator statistics of rho for the standard pair:
// E[rho_h - rho_0]/h against the index-form sum plus twice pair_f, and
// E[(rho_h - rho_0)^2]/h against the constant 8; both within 3 SE.
GenRhoRecord generator_oracle_rho(const geom::Point& x0, const geom::Point& y0,
                                  const spectral2d::BallSpectrum& ball,
                                  const spectral2d::BallDomain& dom, double h,
                                  int n_samples, std::uint64_t seed);

struct GenFRecord {
  double drift_est = 0.0, drift_se = 0.0, drift_ref = 0.0;
  int samples = 0;
  bool pass = false;
};

// Same experiment for pair_f under the modified coupling, against the
// closed-form generator above.
GenFRecord generator_oracle_f(const geom::Point& x0, const geom::Point& y0,
                              const spectral2d::BallSpectrum& ball,
                              const spectral2d::BallDomain& dom, double h,
                              int n_samples, std::uint64_t seed);

struct MonitorRecord {
  int paths = 0;
  int coupled = 0;
  double max_g = -std::numeric_limits<double>::infinity();
  double max_g_at_merge = 0.0;  // largest |F - 2 psi| at a merge event
};

// Tracks G_t = pair_f - 2 psi(xi_t) along modified pairs; the concavity
// comparison makes G a supermartingale from G_0 <= 0, so its running max
// stays near zero and G vanishes at the merge.  Recorded only while rho is
// inside (eps_couple, 2R - eps_couple).
MonitorRecord modulus_preservation_monitor(const CoupledPair& pair0,
                                           const SimConfig& config,
                                           const spectral2d::BallSpectrum& ball,
                                           const spectral2d::BallDomain& dom,
                                           const spectral1d::Model1D& model,
                                           const spectral1d::Spectrum1D& spec1d);

}  // namespace gaplab::coupling

#endif

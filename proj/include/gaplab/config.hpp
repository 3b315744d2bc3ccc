#ifndef GAPLAB_CONFIG_HPP
#define GAPLAB_CONFIG_HPP

#include <limits>
#include <string>
#include <vector>

#include "gaplab/coupling.hpp"
#include "gaplab/potential.hpp"

namespace gaplab::harness {

enum class Kind { solve1d, solveball, verify, couple, sweep };

enum class CoupleExperiment {
  fraction,
  compare,
  supermartingale,
  feynman_kac,
  generators,
  monitor,
};

const char* kind_name(Kind k);
const char* experiment_name(CoupleExperiment e);

// One experiment, fully resolved.  Assertion thresholds left NaN (or flags
// left false) disable the corresponding check; `run` reports them as
// skipped.  A sweep carries one resolved config per cell.
struct ExperimentConfig {
  Kind kind = Kind::solve1d;

  // model
  int n = 2;
  double k = 0.0;
  double D = std::numeric_limits<double>::quiet_NaN();  // 1-D width
  double R = std::numeric_limits<double>::quiet_NaN();  // ball radius
  Potential V;
  std::string v_text = "0";

  // discretization
  int grid = 4097;        // radial grid of the ball solver
  int grid1d = 4097;      // interval grid of the 1-D solver

  // Monte Carlo
  coupling::SimConfig sim;
  CoupleExperiment experiment = CoupleExperiment::fraction;
  double xi0 = std::numeric_limits<double>::quiet_NaN();  // half start distance
  double x0_r = std::numeric_limits<double>::quiet_NaN();
  double x0_theta = 0.0;
  double h_gen = 1e-4;    // generator oracle step

  // checkers
  int pairs = 10000;
  std::vector<int> refine_grids;  // modulus decay study, ascending
  int ode_orders = 0;             // random models for the residual study

  // assertions (NaN or false: disabled)
  double expect_lambda1 = std::numeric_limits<double>::quiet_NaN();
  double atol_lambda1 = std::numeric_limits<double>::quiet_NaN();
  double expect_lambda2 = std::numeric_limits<double>::quiet_NaN();
  double atol_lambda2 = std::numeric_limits<double>::quiet_NaN();
  bool expect_flat_gap = false;
  bool expect_bessel = false;
  double rtol = 1e-6;
  double gap_margin_min = std::numeric_limits<double>::quiet_NaN();
  double condition_min = std::numeric_limits<double>::quiet_NaN();
  double modulus_tol = std::numeric_limits<double>::quiet_NaN();
  double min_coupled_fraction = std::numeric_limits<double>::quiet_NaN();
  double tol_path = std::numeric_limits<double>::quiet_NaN();
  double monitor_tol = std::numeric_limits<double>::quiet_NaN();
  double order_tol = 0.3;

  // sweep
  Kind cell_kind = Kind::verify;
  std::vector<ExperimentConfig> cells;

  std::string raw_text;  // the text this config was parsed from, echoed
};

// Parses the flat key=value format: one or more KEY=VALUE tokens per line,
// '#' starts a comment.  Duplicate, unknown, or malformed keys raise
// ParseError naming the line; out-of-range parameters raise
// ValidationError citing the violated bound.
ExperimentConfig parse_config(const std::string& text);

// Width of the 1-D comparison model attached to a ball of radius R: the
// diameter, clamped just below the pole pi/sqrt(k) for k > 0.
double model_width(double k, double R);

// The 1-D potential paired with a radial V: the same even profile for
// k = 0 (exact transplantation), zero otherwise (a valid convexity modulus
// for the convex desk potentials).
Potential paired_vtilde(double k, const Potential& V,
                        const std::string& v_text);

}  // namespace gaplab::harness

#endif

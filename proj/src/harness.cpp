#include "gaplab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <sstream>
#include <thread>

#include "gaplab/coupling.hpp"
#include "gaplab/errors.hpp"
#include "gaplab/mathutil.hpp"
#include "gaplab/rng.hpp"
#include "gaplab/spectral1d.hpp"
#include "gaplab/spectral2d.hpp"

namespace gaplab::harness {

namespace {

constexpr double kPi = 3.14159265358979323846;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

geom::Point polar_point(const geom::ModelSpace& sp, double r, double theta) {
  geom::Vec v = geom::Vec::Zero(sp.ambient_dim());
  const int off = sp.k < 0.0 ? 1 : 0;
  v[off] = r * std::cos(theta);
  v[off + 1] = r * std::sin(theta);
  return geom::exp_map(sp, {geom::base_point(sp), v});
}

Json config_json(const ExperimentConfig& c) {
  Json j = Json::object();
  j["kind"] = kind_name(c.kind);
  j["n"] = c.n;
  j["k"] = c.k;
  if (std::isfinite(c.D)) j["D"] = c.D;
  if (std::isfinite(c.R)) j["R"] = c.R;
  j["V"] = c.v_text;
  j["grid"] = c.grid;
  j["grid1d"] = c.grid1d;
  j["dt"] = c.sim.dt;
  j["T"] = c.sim.T;
  j["trajectories"] = c.sim.trajectories;
  j["seed"] = static_cast<long long>(c.sim.seed);
  j["eps_couple"] = c.sim.eps_couple;
  j["max_halvings"] = c.sim.max_halvings;
  j["threads"] = c.sim.threads;
  if (!c.sim.obs_times.empty()) {
    Json arr = Json::array();
    for (double t : c.sim.obs_times) arr.push_back(t);
    j["obs_times"] = std::move(arr);
  }
  if (c.kind == Kind::couple) {
    j["experiment"] = experiment_name(c.experiment);
    if (std::isfinite(c.xi0)) j["xi0"] = c.xi0;
    if (std::isfinite(c.x0_r)) j["x0_r"] = c.x0_r;
    j["x0_theta"] = c.x0_theta;
    j["h_gen"] = c.h_gen;
  }
  j["pairs"] = c.pairs;
  if (!c.refine_grids.empty()) {
    Json arr = Json::array();
    for (int g : c.refine_grids) arr.push_back(g);
    j["refine_grids"] = std::move(arr);
  }
  if (c.ode_orders > 0) j["ode_orders"] = c.ode_orders;
  j["rtol"] = c.rtol;
  j["order_tol"] = c.order_tol;
  auto opt = [&](const char* key, double v) {
    if (std::isfinite(v)) j[key] = v;
  };
  opt("expect_lambda1", c.expect_lambda1);
  opt("atol_lambda1", c.atol_lambda1);
  opt("expect_lambda2", c.expect_lambda2);
  opt("atol_lambda2", c.atol_lambda2);
  if (c.expect_flat_gap) j["expect_flat_gap"] = true;
  if (c.expect_bessel) j["expect_bessel"] = true;
  opt("gap_margin_min", c.gap_margin_min);
  opt("condition_min", c.condition_min);
  opt("modulus_tol", c.modulus_tol);
  opt("min_coupled_fraction", c.min_coupled_fraction);
  opt("tol_path", c.tol_path);
  opt("monitor_tol", c.monitor_tol);
  if (c.kind == Kind::sweep) {
    j["cell_kind"] = kind_name(c.cell_kind);
    Json cells = Json::array();
    for (const ExperimentConfig& cell : c.cells)
      cells.push_back(config_json(cell));
    j["cells"] = std::move(cells);
  }
  return j;
}

void push(VerificationReport& rep, Assertion a) {
  rep.assertions.push_back(std::move(a));
}

// |value - expect| <= atol, or rtol relative when no atol was given
void expect_value(VerificationReport& rep, const std::string& name,
                  double value, double expect, double atol, double rtol) {
  Assertion a;
  a.name = name;
  a.value = value;
  const bool absolute = std::isfinite(atol);
  a.threshold = absolute ? atol : rtol;
  const double err = std::abs(value - expect);
  a.pass = absolute ? err <= atol : err <= rtol * std::abs(expect);
  std::ostringstream os;
  os << (absolute ? "absolute" : "relative") << " error "
     << (absolute ? err : err / std::abs(expect)) << " against " << expect;
  a.detail = os.str();
  push(rep, std::move(a));
}

Json spectrum_json(double l1, double l2, double l1_grid, double l2_grid,
                   int grid) {
  Json j = Json::object();
  j["lambda1"] = l1;
  j["lambda2"] = l2;
  j["gap"] = l2 - l1;
  j["grid"] = grid;
  // extrapolation deltas stand in for discretization error bars
  j["richardson_delta1"] = std::abs(l1 - l1_grid);
  j["richardson_delta2"] = std::abs(l2 - l2_grid);
  return j;
}

void run_solve1d(const ExperimentConfig& c, VerificationReport& rep) {
  const spectral1d::Model1D model(c.n, c.k, c.D, c.V);
  const auto t0 = Clock::now();
  const spectral1d::Spectrum1D spec =
      spectral1d::solve_richardson(model, c.grid1d);
  rep.root["timings"]["solve_s"] = seconds_since(t0);
  rep.root["spectrum"] = spectrum_json(spec.lambda1, spec.lambda2,
                                       spec.lambda1_grid, spec.lambda2_grid,
                                       c.grid1d);
  std::ostringstream csv;
  spectral1d::export_csv(model, spec, csv);
  rep.attachments["profile.csv"] = csv.str();

  const double gap = spec.lambda2 - spec.lambda1;
  if (c.expect_flat_gap) {
    const double ref = 3.0 * kPi * kPi / (c.D * c.D);
    expect_value(rep, "flat_gap", gap, ref,
                 std::numeric_limits<double>::quiet_NaN(), c.rtol);
    rep.root["flat_gap_reference"] = ref;
  }
  if (std::isfinite(c.expect_lambda1))
    expect_value(rep, "lambda1", spec.lambda1, c.expect_lambda1,
                 c.atol_lambda1, c.rtol);
  if (std::isfinite(c.expect_lambda2))
    expect_value(rep, "lambda2", spec.lambda2, c.expect_lambda2,
                 c.atol_lambda2, c.rtol);

  if (c.ode_orders > 0) {
    const auto t1 = Clock::now();
    Json all = Json::array();
    for (int i = 0; i < c.ode_orders; ++i) {
      rng::Stream st(c.sim.seed, static_cast<std::uint64_t>(i), 0,
                     rng::kDomainSampler);
      const int n = st.next_uniform() < 0.5 ? 2 : 3;
      const double k = -1.0 + 2.0 * st.next_uniform();
      const double dmax =
          k > 0.0 ? std::min(2.2, kPi / std::sqrt(k) - 1e-3) : 2.2;
      const double D = 0.8 + st.next_uniform() * (dmax - 0.8);
      const double c0 = -1.0 + 2.0 * st.next_uniform();
      const double c2 = st.next_uniform();
      const spectral1d::Model1D m(n, k, D,
                                  Potential::polynomial({c0, 0.0, c2}));
      std::vector<double> h, epsi, ephi;
      for (int G : {257, 513, 1025}) {
        const spectral1d::Spectrum1D sg = spectral1d::solve_spectrum(m, G);
        h.push_back(D / (G - 1));
        epsi.push_back(spectral1d::inner_max(
            m, sg, spectral1d::psi_ode_residual(m, sg), 0.9));
        ephi.push_back(spectral1d::inner_max(
            m, sg, spectral1d::phi_ode_residual(m, sg), 0.9));
      }
      const double order_psi = mathutil::fit_order(h, epsi);
      const double order_phi = mathutil::fit_order(h, ephi);
      Json entry = Json::object();
      entry["n"] = n;
      entry["k"] = k;
      entry["D"] = D;
      entry["V"] = "poly:" + std::to_string(c0) + ",0," + std::to_string(c2);
      entry["order_psi"] = order_psi;
      entry["order_phi"] = order_phi;
      Json errs = Json::array();
      for (std::size_t g = 0; g < h.size(); ++g) {
        Json row = Json::object();
        row["h"] = h[g];
        row["resid_psi"] = epsi[g];
        row["resid_phi"] = ephi[g];
        errs.push_back(std::move(row));
      }
      entry["residuals"] = std::move(errs);
      all.push_back(std::move(entry));

      const std::string tag = "_model" + std::to_string(i);
      expect_value(rep, "psi_order" + tag, order_psi, 2.0, c.order_tol,
                   c.rtol);
      expect_value(rep, "phi_order" + tag, order_phi, 2.0, c.order_tol,
                   c.rtol);
    }
    rep.root["ode_orders"] = std::move(all);
    rep.root["timings"]["order_study_s"] = seconds_since(t1);
  }
}

void run_solveball(const ExperimentConfig& c, VerificationReport& rep) {
  const geom::ModelSpace sp(c.k, 2);
  const spectral2d::BallDomain dom(sp, c.R, c.V);
  const auto t0 = Clock::now();
  const spectral2d::BallSpectrum ball = spectral2d::solve_ball(dom, c.grid);
  rep.root["timings"]["solve_s"] = seconds_since(t0);
  Json spec = spectrum_json(ball.lambda1, ball.lambda2, ball.lambda1_grid,
                            ball.lambda2_grid, c.grid);
  spec["mode2"] =
      ball.mode2 == spectral2d::Mode2::angular ? "angular" : "radial";
  rep.root["spectrum"] = std::move(spec);
  std::ostringstream csv;
  spectral2d::export_csv(dom, ball, csv);
  rep.attachments["profile.csv"] = csv.str();

  if (std::isfinite(c.expect_lambda1))
    expect_value(rep, "lambda1", ball.lambda1, c.expect_lambda1,
                 c.atol_lambda1, c.rtol);
  if (std::isfinite(c.expect_lambda2))
    expect_value(rep, "lambda2", ball.lambda2, c.expect_lambda2,
                 c.atol_lambda2, c.rtol);
  if (c.expect_bessel) {
    const double z0 = mathutil::first_bessel_zero(0) / c.R;
    const double z1 = mathutil::first_bessel_zero(1) / c.R;
    rep.root["bessel_reference"] = Json::object();
    rep.root["bessel_reference"]["lambda1"] = z0 * z0;
    rep.root["bessel_reference"]["lambda2"] = z1 * z1;
    expect_value(rep, "lambda1_bessel", ball.lambda1, z0 * z0,
                 std::numeric_limits<double>::quiet_NaN(), c.rtol);
    expect_value(rep, "lambda2_bessel", ball.lambda2, z1 * z1,
                 std::numeric_limits<double>::quiet_NaN(), c.rtol);
  }
}

struct Bundle {
  spectral2d::BallDomain dom;
  spectral2d::BallSpectrum ball;
  spectral1d::Model1D model;
  spectral1d::Spectrum1D spec1d;
};

Bundle make_bundle(const ExperimentConfig& c) {
  const geom::ModelSpace sp(c.k, 2);
  spectral2d::BallDomain dom(sp, c.R, c.V);
  spectral2d::BallSpectrum ball = spectral2d::solve_ball(dom, c.grid);
  spectral1d::Model1D model(2, c.k, model_width(c.k, c.R),
                            paired_vtilde(c.k, c.V, c.v_text));
  spectral1d::Spectrum1D spec1d =
      spectral1d::solve_richardson(model, c.grid1d);
  return {std::move(dom), std::move(ball), std::move(model),
          std::move(spec1d)};
}

void run_verify(const ExperimentConfig& c, VerificationReport& rep) {
  const auto t0 = Clock::now();
  const Bundle b = make_bundle(c);
  rep.root["timings"]["solve_s"] = seconds_since(t0);
  rep.root["model_D"] = b.model.D;
  rep.root["spectrum_ball"] =
      spectrum_json(b.ball.lambda1, b.ball.lambda2, b.ball.lambda1_grid,
                    b.ball.lambda2_grid, c.grid);
  rep.root["spectrum_model"] =
      spectrum_json(b.spec1d.lambda1, b.spec1d.lambda2, b.spec1d.lambda1_grid,
                    b.spec1d.lambda2_grid, c.grid1d);
  {
    std::ostringstream csv;
    spectral2d::export_csv(b.dom, b.ball, csv);
    rep.attachments["ball.csv"] = csv.str();
  }
  {
    std::ostringstream csv;
    spectral1d::export_csv(b.model, b.spec1d, csv);
    rep.attachments["model.csv"] = csv.str();
  }

  const spectral2d::GapReport gap =
      spectral2d::check_gap_comparison(b.dom, b.ball, b.spec1d);
  Json gj = Json::object();
  gj["gap_ball"] = gap.gap_ball;
  gj["gap_model"] = gap.gap_model;
  gj["margin"] = gap.margin;
  rep.root["gap"] = std::move(gj);
  if (std::isfinite(c.gap_margin_min)) {
    Assertion a;
    a.name = "gap_margin";
    a.value = gap.margin;
    a.threshold = c.gap_margin_min;
    a.pass = gap.margin >= c.gap_margin_min;
    a.detail = "ball gap minus model gap";
    push(rep, std::move(a));
  }

  bool condition_ok = true;
  if (std::isfinite(c.condition_min)) {
    const auto t1 = Clock::now();
    const spectral2d::ConditionReport cr = spectral2d::check_condition(
        b.dom, b.ball, b.model, b.spec1d, c.pairs, c.sim.seed);
    rep.root["timings"]["condition_s"] = seconds_since(t1);
    Json cj = Json::object();
    cj["min_margin"] = cr.min_margin;
    cj["samples"] = cr.samples;
    cj["seed"] = static_cast<long long>(cr.seed);
    rep.root["condition"] = std::move(cj);
    Assertion a;
    a.name = "condition_margin";
    a.value = cr.min_margin;
    a.threshold = c.condition_min;
    a.pass = cr.min_margin >= c.condition_min;
    a.detail = "sampled minimum of the log-concavity precondition";
    condition_ok = a.pass;
    push(rep, std::move(a));
  }

  if (std::isfinite(c.modulus_tol)) {
    if (std::isfinite(c.condition_min) && !condition_ok) {
      Assertion a;
      a.name = "modulus_max";
      a.threshold = c.modulus_tol;
      a.pass = false;
      a.detail = "precondition not verified; concavity check skipped";
      push(rep, std::move(a));
    } else {
      const auto t1 = Clock::now();
      std::vector<int> grids = c.refine_grids;
      if (grids.empty()) grids = {c.grid};
      Json seq = Json::array();
      std::vector<double> viol;
      for (int G : grids) {
        const bool reuse2 = G == c.grid;
        const bool reuse1 = G == c.grid1d;
        const spectral2d::BallSpectrum ball_g =
            reuse2 ? b.ball : spectral2d::solve_ball(b.dom, G);
        const spectral1d::Spectrum1D spec_g =
            reuse1 ? b.spec1d : spectral1d::solve_richardson(b.model, G);
        const spectral2d::ModulusReport mr = spectral2d::check_modulus_concavity(
            b.dom, ball_g, b.model, spec_g, c.pairs, c.sim.seed);
        viol.push_back(std::max(0.0, mr.max_delta));
        Json row = Json::object();
        row["grid"] = G;
        row["max_delta"] = mr.max_delta;
        row["violation"] = viol.back();
        row["samples"] = mr.samples;
        seq.push_back(std::move(row));
      }
      rep.root["modulus"] = std::move(seq);
      rep.root["timings"]["modulus_s"] = seconds_since(t1);
      Assertion a;
      a.name = "modulus_max";
      a.value = viol.back();
      a.threshold = c.modulus_tol;
      a.pass = viol.back() <= c.modulus_tol;
      a.detail = "positive part of the worst sampled concavity defect";
      push(rep, std::move(a));
      if (viol.size() >= 2) {
        Assertion d;
        d.name = "modulus_decay";
        d.value = viol.back();
        d.threshold = 1.1 * viol.front() + 1e-12;
        d.pass = viol.back() <= d.threshold;
        d.detail = "violation must not grow under grid refinement";
        push(rep, std::move(d));
      }
    }
  }
}

Json at_rows_super(const coupling::SuperRecord& rec) {
  Json arr = Json::array();
  for (const auto& at : rec.at) {
    Json row = Json::object();
    row["t"] = at.t;
    row["mean"] = at.mean;
    row["se"] = at.se;
    row["bound"] = at.bound;
    row["uncoupled"] = at.uncoupled;
    row["pass"] = at.pass;
    arr.push_back(std::move(row));
  }
  return arr;
}

void run_couple(const ExperimentConfig& c, VerificationReport& rep) {
  const auto t0 = Clock::now();
  const geom::ModelSpace sp(c.k, 2);
  const spectral2d::BallDomain dom(sp, c.R, c.V);
  const spectral2d::BallSpectrum ball = spectral2d::solve_ball(dom, c.grid);
  rep.root["timings"]["solve_s"] = seconds_since(t0);

  auto axis_pair = [&](coupling::Mode mode) {
    coupling::CoupledPair pair;
    pair.x = polar_point(sp, c.xi0, 0.0);
    pair.y = polar_point(sp, c.xi0, kPi);
    pair.mode = mode;
    return pair;
  };

  const auto t1 = Clock::now();
  switch (c.experiment) {
    case CoupleExperiment::fraction: {
      const coupling::FractionRecord rec = coupling::coupling_fraction(
          axis_pair(coupling::Mode::standard), c.sim, ball, dom);
      Json j = Json::object();
      j["trajectories"] = rec.trajectories;
      j["coupled"] = rec.coupled;
      j["fraction"] = rec.fraction;
      j["se"] = std::sqrt(rec.fraction * (1.0 - rec.fraction) /
                          std::max(1, rec.trajectories));
      j["mean_tau"] = rec.mean_tau;
      j["boundary_halvings"] = rec.boundary_halvings;
      j["rejected_steps"] = rec.rejected_steps;
      j["stuck"] = rec.stuck;
      rep.root["fraction"] = std::move(j);
      if (std::isfinite(c.min_coupled_fraction)) {
        Assertion a;
        a.name = "coupled_fraction";
        a.value = rec.fraction;
        a.threshold = c.min_coupled_fraction;
        a.pass = rec.fraction >= c.min_coupled_fraction;
        a.detail = std::to_string(rec.coupled) + " of " +
                   std::to_string(rec.trajectories) + " merged by T";
        push(rep, std::move(a));
      }
      break;
    }
    case CoupleExperiment::compare: {
      const double tol = std::isfinite(c.tol_path) ? c.tol_path : 1e-8;
      const coupling::CompareRecord rec = coupling::shared_noise_compare(
          axis_pair(coupling::Mode::standard), c.sim, ball, dom, tol);
      Json j = Json::object();
      j["paths"] = rec.paths;
      j["total_steps"] = rec.total_steps;
      j["violating_steps"] = rec.violating_steps;
      j["min_ordered_gap"] = rec.min_ordered_gap;
      j["tau_violations"] = rec.tau_violations;
      j["lead_coupled"] = rec.lead_coupled;
      j["sign"] = rec.sign;
      j["tol_path"] = tol;
      rep.root["compare"] = std::move(j);
      Assertion a;
      a.name = "ordered_every_step";
      a.value = rec.min_ordered_gap;
      a.threshold = -tol;
      a.pass = rec.violating_steps == 0;
      a.detail = std::to_string(rec.violating_steps) + " of " +
                 std::to_string(rec.total_steps) + " steps out of order";
      push(rep, std::move(a));
      Assertion b;
      b.name = "merge_order";
      b.value = static_cast<double>(rec.tau_violations);
      b.threshold = 0.0;
      b.pass = rec.tau_violations == 0;
      b.detail = "paths whose lagging distance was absorbed strictly first";
      push(rep, std::move(b));
      break;
    }
    case CoupleExperiment::supermartingale: {
      const spectral1d::Model1D model(2, c.k, model_width(c.k, c.R),
                                      paired_vtilde(c.k, c.V, c.v_text));
      const spectral1d::Spectrum1D spec1d =
          spectral1d::solve_richardson(model, c.grid1d);
      const coupling::SuperRecord rec = coupling::supermartingale_check(
          axis_pair(coupling::Mode::standard), c.sim, ball, dom, model,
          spec1d);
      Json j = Json::object();
      j["at"] = at_rows_super(rec);
      j["phi0"] = rec.phi0;
      j["gap_model"] = rec.gap_model;
      j["fitted_rate"] = rec.fitted_rate;
      rep.root["supermartingale"] = std::move(j);
      std::vector<std::array<double, 3>> rows;
      for (const auto& at : rec.at) rows.push_back({at.t, at.mean, at.se});
      rep.attachments["phi.dat"] = plot_table(rows);
      Assertion a;
      a.name = "profile_below_bound";
      a.value = rec.fitted_rate;
      a.threshold = rec.gap_model;
      a.pass = rec.pass;
      a.detail = "ensemble ratio profile against exp(-gap t) at every time";
      push(rep, std::move(a));
      break;
    }
    case CoupleExperiment::feynman_kac: {
      const geom::Point x0 = polar_point(sp, c.x0_r, c.x0_theta);
      const coupling::FkRecord rec =
          coupling::feynman_kac_check(x0, c.sim, ball, dom);
      Json arr = Json::array();
      for (const auto& at : rec.at) {
        Json row = Json::object();
        row["t"] = at.t;
        row["estimate"] = at.estimate;
        row["se"] = at.se;
        row["reference"] = at.reference;
        row["pass"] = at.pass;
        arr.push_back(std::move(row));
      }
      Json j = Json::object();
      j["at"] = std::move(arr);
      j["gap"] = rec.gap;
      j["v0"] = rec.v0;
      rep.root["feynman_kac"] = std::move(j);
      std::vector<std::array<double, 3>> rows;
      for (const auto& at : rec.at) rows.push_back({at.t, at.estimate, at.se});
      rep.attachments["v0.dat"] = plot_table(rows);
      Assertion a;
      a.name = "expectation_matches";
      a.value = rec.gap;
      a.threshold = 3.0;
      a.pass = rec.pass;
      a.detail = "first excited observable within 3 SE of its decay law";
      push(rep, std::move(a));
      break;
    }
    case CoupleExperiment::generators: {
      const geom::Point x0 = polar_point(sp, c.xi0, 0.0);
      const geom::Point y0 = polar_point(sp, c.xi0, kPi);
      const coupling::GenRhoRecord gr = coupling::generator_oracle_rho(
          x0, y0, ball, dom, c.h_gen, c.sim.trajectories, c.sim.seed);
      const coupling::GenFRecord gf = coupling::generator_oracle_f(
          x0, y0, ball, dom, c.h_gen, c.sim.trajectories, c.sim.seed);
      Json rho = Json::object();
      rho["drift_est"] = gr.drift_est;
      rho["drift_se"] = gr.drift_se;
      rho["drift_ref"] = gr.drift_ref;
      rho["qv_est"] = gr.qv_est;
      rho["qv_se"] = gr.qv_se;
      rho["qv_ref"] = gr.qv_ref;
      rho["samples"] = gr.samples;
      Json f = Json::object();
      f["drift_est"] = gf.drift_est;
      f["drift_se"] = gf.drift_se;
      f["drift_ref"] = gf.drift_ref;
      f["samples"] = gf.samples;
      Json j = Json::object();
      j["rho"] = std::move(rho);
      j["f"] = std::move(f);
      j["h"] = c.h_gen;
      rep.root["generators"] = std::move(j);
      Assertion a;
      a.name = "rho_drift";
      a.value = (gr.drift_est - gr.drift_ref) / gr.drift_se;
      a.threshold = 3.0;
      a.pass = gr.pass_drift;
      a.detail = "one-step mean against index-form sum plus twice F";
      push(rep, std::move(a));
      Assertion b;
      b.name = "rho_qv";
      b.value = (gr.qv_est - gr.qv_ref) / gr.qv_se;
      b.threshold = 3.0;
      b.pass = gr.pass_qv;
      b.detail = "one-step variance rate against the constant 8";
      push(rep, std::move(b));
      Assertion g;
      g.name = "f_drift";
      g.value = (gf.drift_est - gf.drift_ref) / gf.drift_se;
      g.threshold = 3.0;
      g.pass = gf.pass;
      g.detail = "one-step mean of F against its closed-form generator";
      push(rep, std::move(g));
      break;
    }
    case CoupleExperiment::monitor: {
      const spectral1d::Model1D model(2, c.k, model_width(c.k, c.R),
                                      paired_vtilde(c.k, c.V, c.v_text));
      const spectral1d::Spectrum1D spec1d =
          spectral1d::solve_richardson(model, c.grid1d);
      const coupling::MonitorRecord rec =
          coupling::modulus_preservation_monitor(
              axis_pair(coupling::Mode::modified), c.sim, ball, dom, model,
              spec1d);
      Json j = Json::object();
      j["paths"] = rec.paths;
      j["coupled"] = rec.coupled;
      j["max_g"] = rec.max_g;
      j["max_g_at_merge"] = rec.max_g_at_merge;
      rep.root["monitor"] = std::move(j);
      const double tol = std::isfinite(c.monitor_tol) ? c.monitor_tol : 5e-3;
      Assertion a;
      a.name = "contraction_envelope";
      a.value = rec.max_g;
      a.threshold = tol;
      a.pass = rec.max_g <= tol;
      a.detail = "running max of F - 2 psi from a nonpositive start; " +
                 std::to_string(rec.coupled) + " of " +
                 std::to_string(rec.paths) + " merged";
      push(rep, std::move(a));
      break;
    }
  }
  rep.root["timings"]["mc_s"] = seconds_since(t1);
}

void run_sweep(const ExperimentConfig& c, VerificationReport& rep,
               const std::string& out_dir) {
  const std::size_t ncells = c.cells.size();
  std::vector<VerificationReport> sub(ncells);
  std::vector<EmitResult> emitted(ncells);
  std::vector<std::string> errors(ncells);

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min<std::size_t>(std::max<std::size_t>(ncells, 1), hw);
  std::atomic<std::size_t> cursor{0};
  auto work = [&]() {
    for (std::size_t i; (i = cursor.fetch_add(1)) < ncells;) {
      try {
        sub[i] = run(c.cells[i]);
        if (!out_dir.empty()) emitted[i] = emit(sub[i], out_dir);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  if (ncells > 0) {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w + 1 < workers; ++w) pool.emplace_back(work);
    work();
    for (std::thread& t : pool) t.join();
  }

  Json index = Json::array();
  for (std::size_t i = 0; i < ncells; ++i) {
    const std::string tag = "cell" + std::to_string(i);
    Json row = Json::object();
    row["config"] = config_json(c.cells[i]);
    if (!errors[i].empty()) {
      row["error"] = errors[i];
      row["pass"] = false;
      Assertion a;
      a.name = tag;
      a.pass = false;
      a.detail = errors[i];
      push(rep, std::move(a));
    } else {
      row["pass"] = sub[i].all_pass();
      if (!emitted[i].json_path.empty()) {
        row["file"] =
            std::filesystem::path(emitted[i].json_path).filename().string();
        row["hash"] = emitted[i].hash;
      }
      for (const Assertion& a : sub[i].assertions) {
        Assertion flat = a;
        flat.name = tag + "/" + a.name;
        push(rep, std::move(flat));
      }
    }
    index.push_back(std::move(row));
  }
  rep.root["cells"] = std::move(index);
}

}  // namespace

bool VerificationReport::all_pass() const {
  for (const Assertion& a : assertions)
    if (a.enabled && !a.pass) return false;
  return true;
}

Json VerificationReport::to_json() const {
  Json j = root;
  Json arr = Json::array();
  for (const Assertion& a : assertions) {
    Json row = Json::object();
    row["name"] = a.name;
    row["enabled"] = a.enabled;
    row["pass"] = a.pass;
    row["value"] = a.value;
    row["threshold"] = a.threshold;
    row["detail"] = a.detail;
    arr.push_back(std::move(row));
  }
  j["assertions"] = std::move(arr);
  j["pass"] = all_pass();
  return j;
}

VerificationReport run(const ExperimentConfig& cfg,
                       const std::string& out_dir) {
  VerificationReport rep;
  const auto t0 = Clock::now();
  rep.root["kind"] = kind_name(cfg.kind);
  rep.root["config"] = config_json(cfg);
  switch (cfg.kind) {
    case Kind::solve1d: run_solve1d(cfg, rep); break;
    case Kind::solveball: run_solveball(cfg, rep); break;
    case Kind::verify: run_verify(cfg, rep); break;
    case Kind::couple: run_couple(cfg, rep); break;
    case Kind::sweep: run_sweep(cfg, rep, out_dir); break;
  }
  rep.root["timings"]["total_s"] = seconds_since(t0);
  return rep;
}

EmitResult emit(const VerificationReport& rep, const std::string& out_dir) {
  return emit_report(rep.to_json(), rep.attachments, out_dir);
}

}  // namespace gaplab::harness

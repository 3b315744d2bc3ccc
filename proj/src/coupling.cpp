#include "gaplab/coupling.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <thread>
#include <utility>

#include "gaplab/errors.hpp"
#include "gaplab/special.hpp"

namespace gaplab::coupling {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kStandoffFrac = 1e-4;

struct RadialInfo {
  double r = 0.0;
  geom::Vec outward;  // unit; zero vector at the center
};

RadialInfo radial_at(const spectral2d::BallDomain& dom, const geom::Point& p) {
  RadialInfo info;
  info.r = geom::distance(dom.space, p, dom.center());
  if (info.r < 1e-12) {
    info.outward = geom::Vec::Zero(dom.space.ambient_dim());
    info.r = 0.0;
    return info;
  }
  const geom::Tangent inward = geom::log_map(dom.space, p, dom.center());
  info.outward = -inward.vec / info.r;
  return info;
}

// omega'(r) with the simple-pole form taking over inside the wall standoff.
double omega_prime_at(const spectral2d::BallDomain& dom,
                      const spectral2d::BallSpectrum& ball, double r) {
  if (r < dom.R * (1.0 - kStandoffFrac)) return ball.omega.at(r);
  if (r < dom.R) return -1.0 / (dom.R - r);
  throw BoundaryError("coupling: position left the ball; stepper bug");
}

geom::Vec grad_omega(const spectral2d::BallDomain& dom,
                     const spectral2d::BallSpectrum& ball,
                     const RadialInfo& info) {
  if (info.r == 0.0) return info.outward;  // already the zero vector
  return geom::Vec(omega_prime_at(dom, ball, info.r) * info.outward);
}

// Everything a base step needs that does not depend on dt_eff: drift
// vectors and the sqrt(2)-scaled noise realizations at both points, the
// mirror taken at the pre-step positions.
struct Prepared {
  geom::Vec bx, by;  // drifts
  geom::Vec wx, wy;  // noise directions; multiply by sqrt(dt_eff)
};

void drift_vecs(const CoupledPair& pair, const spectral2d::BallSpectrum& ball,
                const spectral2d::BallDomain& dom, const geom::Vec& gamma_x,
                const geom::Vec& gamma_y, double rho, geom::Vec& bx,
                geom::Vec& by) {
  bx = 2.0 * grad_omega(dom, ball, radial_at(dom, pair.x));
  by = 2.0 * grad_omega(dom, ball, radial_at(dom, pair.y));
  if (pair.mode == Mode::modified) {
    const double tn = geom::tn(dom.space.k, 0.5 * rho);
    bx += 2.0 * tn * gamma_x;
    by -= 2.0 * tn * gamma_y;
  }
}

Prepared prepare(const CoupledPair& pair, const geom::Vec& noise,
                 const spectral2d::BallSpectrum& ball,
                 const spectral2d::BallDomain& dom) {
  const auto& space = dom.space;
  const geom::Tangent lx = geom::log_map(space, pair.x, pair.y);
  const geom::Tangent ly = geom::log_map(space, pair.y, pair.x);
  const double rho = geom::norm(space, lx.vec);
  if (rho <= 0.0) throw CoincidentError("coupling: uncoupled pair collapsed");
  const geom::Vec gamma_x = lx.vec / rho;
  const geom::Vec gamma_y = -ly.vec / rho;

  Prepared prep;
  drift_vecs(pair, ball, dom, gamma_x, gamma_y, rho, prep.bx, prep.by);

  const auto frame = geom::adapted_frame(space, pair.x, gamma_x);
  geom::Vec wx = geom::Vec::Zero(space.ambient_dim());
  for (int i = 0; i < space.n; ++i) wx += noise[i] * frame.col(i);
  wx *= std::sqrt(2.0);
  prep.wx = wx;
  prep.wy = geom::mirror_map(space, pair.x, pair.y, {pair.x, wx}).vec;
  return prep;
}

// One proposal at scale dt_eff; commits positions (and the merge) on
// acceptance and leaves the pair untouched otherwise.  The clock is the
// caller's business.
bool attempt_move(CoupledPair& pair, const Prepared& prep, double dt_eff,
                  const spectral2d::BallDomain& dom, double eps_couple) {
  const auto& space = dom.space;
  const double sq = std::sqrt(dt_eff);
  geom::Point px, py;
  try {
    px = geom::exp_map(space,
                       {pair.x, geom::Vec(prep.bx * dt_eff + prep.wx * sq)});
    py = geom::exp_map(space,
                       {pair.y, geom::Vec(prep.by * dt_eff + prep.wy * sq)});
  } catch (const DomainError&) {
    return false;  // overran the injectivity radius: treat as a wall exit
  }
  if (geom::distance(space, px, dom.center()) >= dom.R) return false;
  if (geom::distance(space, py, dom.center()) >= dom.R) return false;
  bool merged = false;
  if (eps_couple > 0.0) {
    const double rho_new = geom::distance(space, px, py);
    if (rho_new < eps_couple) {
      merged = true;
    } else {
      // The continuous pair distance is absorbed at zero, but an Euler step
      // can jump straight across coincidence and come out the far side.  A
      // crossing reverses the pair axis, so compare the old axis (parallel
      // transported along x's step) against the new one whenever the step
      // lengths could have bridged the old separation.
      const double rho_old = geom::distance(space, pair.x, pair.y);
      const geom::Vec mvx = prep.bx * dt_eff + prep.wx * sq;
      const geom::Vec mvy = prep.by * dt_eff + prep.wy * sq;
      if (rho_old <= geom::norm(space, mvx) + geom::norm(space, mvy)) {
        geom::Vec axis_old = geom::log_map(space, pair.x, pair.y).vec / rho_old;
        if (geom::norm(space, mvx) > 0.0)
          axis_old = geom::parallel_transport(space, {pair.x, axis_old}, px).vec;
        const geom::Vec axis_new = geom::log_map(space, px, py).vec / rho_new;
        if (geom::dot(space, axis_old, axis_new) <= 0.0) merged = true;
      }
    }
  }
  pair.x = px;
  pair.y = py;
  if (merged) {
    const geom::Tangent l = geom::log_map(space, px, py);
    const geom::Point mid = geom::exp_map(space, {px, geom::Vec(0.5 * l.vec)});
    pair.x = mid;
    pair.y = mid;
    pair.coupled = true;
  }
  return true;
}

double default_eps(const SimConfig& config, const spectral2d::BallDomain& dom) {
  return config.eps_couple > 0.0 ? config.eps_couple : 1e-3 * dom.R;
}

geom::Vec draw_noise(const SimConfig& config, std::uint64_t traj,
                     std::uint64_t step_idx, int n) {
  rng::Stream st(config.seed, traj, step_idx, rng::kDomainNoise);
  geom::Vec noise(n);
  for (int i = 0; i < n; ++i) noise[i] = st.next_normal();
  return noise;
}

void validate_config(const SimConfig& config) {
  if (!(config.dt > 0.0)) throw DomainError("coupling: dt must be positive");
  if (config.T < 0.0) throw DomainError("coupling: T must be nonnegative");
  if (config.trajectories < 1)
    throw DomainError("coupling: need at least one trajectory");
  if (config.max_halvings < 1)
    throw DomainError("coupling: max_halvings must be >= 1");
  for (std::size_t i = 0; i < config.obs_times.size(); ++i) {
    const double t = config.obs_times[i];
    if (t < 0.0 || t > config.T + 1e-12)
      throw DomainError("coupling: observation time outside [0, T]");
    if (i > 0 && t <= config.obs_times[i - 1])
      throw DomainError("coupling: observation times must ascend");
  }
}

// Deterministic work distribution: slot i is written by whichever worker
// claims index i, and all reductions happen sequentially afterwards.
template <class Fn>
void parallel_for(int n, int threads, Fn&& fn) {
  int tc = threads > 0 ? threads
                       : static_cast<int>(std::thread::hardware_concurrency());
  tc = std::max(1, std::min(tc, n));
  if (tc <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex err_mu;
  std::vector<std::thread> pool;
  pool.reserve(tc);
  for (int t = 0; t < tc; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1, std::memory_order_relaxed);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mu);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

double sample_se(double sum, double sumsq, int n) {
  if (n < 2) return 0.0;
  const double mean = sum / n;
  const double var = std::max(0.0, (sumsq - n * mean * mean) / (n - 1));
  return std::sqrt(var / n);
}

}  // namespace

std::pair<geom::Tangent, geom::Tangent> drift(
    const CoupledPair& pair, const spectral2d::BallSpectrum& ball,
    const spectral2d::BallDomain& dom) {
  if (pair.coupled) throw DomainError("drift: pair already merged");
  const auto& space = dom.space;
  const geom::Tangent lx = geom::log_map(space, pair.x, pair.y);
  const geom::Tangent ly = geom::log_map(space, pair.y, pair.x);
  const double rho = geom::norm(space, lx.vec);
  if (rho <= 0.0) throw CoincidentError("drift: uncoupled pair collapsed");
  geom::Vec bx, by;
  drift_vecs(pair, ball, dom, geom::Vec(lx.vec / rho),
             geom::Vec(-ly.vec / rho), rho, bx, by);
  return {geom::Tangent{pair.x, bx}, geom::Tangent{pair.y, by}};
}

StepOutcome step(const CoupledPair& pair, double dt, const geom::Vec& noise,
                 const spectral2d::BallSpectrum& ball,
                 const spectral2d::BallDomain& dom, double eps_couple,
                 int max_halvings) {
  if (!(dt > 0.0)) throw DomainError("step: dt must be positive");
  if (noise.size() < dom.space.n)
    throw DomainError("step: noise draw shorter than the dimension");
  StepOutcome out;
  out.pair = pair;
  if (pair.coupled) {
    out.pair.t += dt;
    out.advanced = dt;
    return out;
  }
  const Prepared prep = prepare(pair, noise, ball, dom);
  for (int j = 0; j <= max_halvings; ++j) {
    const double dt_eff = std::ldexp(dt, -j);
    if (attempt_move(out.pair, prep, dt_eff, dom, eps_couple)) {
      out.pair.t += dt_eff;
      out.advanced = dt_eff;
      out.halvings = j;
      return out;
    }
  }
  out.pair.t += dt;
  out.advanced = dt;
  out.halvings = max_halvings;
  out.rejected = true;
  return out;
}

double pair_f(const spectral2d::BallSpectrum& ball,
              const spectral2d::BallDomain& dom, const geom::Point& x,
              const geom::Point& y) {
  const auto& space = dom.space;
  const geom::Tangent lx = geom::log_map(space, x, y);
  const geom::Tangent ly = geom::log_map(space, y, x);
  const double rho = geom::norm(space, lx.vec);
  const geom::Vec gamma_x = lx.vec / rho;
  const geom::Vec gamma_y = -ly.vec / rho;
  const geom::Vec gx = grad_omega(dom, ball, radial_at(dom, x));
  const geom::Vec gy = grad_omega(dom, ball, radial_at(dom, y));
  return geom::dot(space, gy, gamma_y) - geom::dot(space, gx, gamma_x);
}

double f_drift_closed_form(const spectral2d::BallDomain& dom,
                           const spectral2d::BallSpectrum& ball,
                           const geom::Point& x, const geom::Point& y) {
  const auto& space = dom.space;
  const double k = space.k;
  const int n = space.n;
  const double rho = geom::distance(space, x, y);
  const double tn = geom::tn(k, 0.5 * rho);
  const double sn2 = geom::sn(k, rho);  // sn_k at twice the half-distance

  const geom::Tangent lx = geom::log_map(space, x, y);
  const geom::Tangent ly = geom::log_map(space, y, x);
  const geom::Vec gamma_x = lx.vec / rho;
  const geom::Vec gamma_y = -ly.vec / rho;

  const RadialInfo ix = radial_at(dom, x);
  const RadialInfo iy = radial_at(dom, y);
  const geom::Vec gx = grad_omega(dom, ball, ix);
  const geom::Vec gy = grad_omega(dom, ball, iy);
  const double axn = geom::dot(space, gx, gamma_x);
  const double ayn = geom::dot(space, gy, gamma_y);

  // the confining potential is radial, so its gradient rides the outward
  // unit tangent
  const double bxn =
      dom.V.deriv(ix.r) * geom::dot(space, ix.outward, gamma_x);
  const double byn =
      dom.V.deriv(iy.r) * geom::dot(space, iy.outward, gamma_y);

  double transverse = 0.0;
  const auto frame = geom::adapted_frame(space, x, gamma_x);
  for (int i = 0; i + 1 < n; ++i) {
    const geom::Vec ei_y =
        geom::parallel_transport(space, {x, geom::Vec(frame.col(i))}, y).vec;
    const double d =
        geom::dot(space, gy, ei_y) - geom::dot(space, gx, geom::Vec(frame.col(i)));
    transverse += d * d;
  }

  return (byn - bxn) + (n - 1) * (k - tn * tn) * (ayn - axn) +
         2.0 * tn *
             (ayn * ayn + axn * axn + 2.0 * ball.lambda1 - dom.V.value(ix.r) -
              dom.V.value(iy.r)) +
         (2.0 / sn2) * transverse;
}

TrajectoryStats simulate(const CoupledPair& pair0, const SimConfig& config,
                         const spectral2d::BallSpectrum& ball,
                         const spectral2d::BallDomain& dom,
                         const spectral1d::PhiEvaluator* phi,
                         std::uint64_t traj_index) {
  validate_config(config);
  const auto& space = dom.space;
  const double eps = default_eps(config, dom);
  const double window_hi = 2.0 * dom.R - eps;

  TrajectoryStats stats;
  CoupledPair pair = pair0;
  pair.t = 0.0;
  std::size_t next_obs = 0;
  std::uint64_t step_idx = 0;
  int consecutive_rejects = 0;

  auto record = [&](double t_target) {
    Observation o;
    o.t = t_target;
    if (pair.coupled) {
      o.xi = 0.0;
      o.f = kNaN;
      o.phi = phi ? 0.0 : kNaN;
    } else {
      const double rho = geom::distance(space, pair.x, pair.y);
      o.xi = 0.5 * rho;
      o.f = (rho > eps && rho < window_hi) ? pair_f(ball, dom, pair.x, pair.y)
                                           : kNaN;
      o.phi = phi ? phi->at(std::min(o.xi, phi->x_max())) : kNaN;
    }
    stats.samples.push_back(o);
  };

  const auto& obs = config.obs_times;
  while (next_obs < obs.size() && obs[next_obs] <= 1e-12) {
    record(obs[next_obs]);
    ++next_obs;
  }

  while (pair.t < config.T - 1e-12 && !pair.coupled) {
    double dt_base = config.dt;
    if (next_obs < obs.size())
      dt_base = std::min(dt_base, obs[next_obs] - pair.t);
    dt_base = std::min(dt_base, config.T - pair.t);

    const geom::Vec noise = draw_noise(config, traj_index, step_idx++, space.n);
    const StepOutcome out =
        step(pair, dt_base, noise, ball, dom, eps, config.max_halvings);
    stats.boundary_halvings += out.halvings;
    if (out.rejected) {
      ++stats.rejected_steps;
      if (++consecutive_rejects >= config.max_halvings)
        throw StuckError("simulate: trajectory pinned at the wall");
    } else {
      consecutive_rejects = 0;
    }
    pair = out.pair;
    if (pair.coupled && !std::isfinite(stats.tau)) stats.tau = pair.t;
    while (next_obs < obs.size() && pair.t >= obs[next_obs] - 1e-12) {
      record(obs[next_obs]);
      ++next_obs;
    }
  }
  // merged (or already at T): later times carry the frozen pair
  while (next_obs < obs.size()) {
    record(obs[next_obs]);
    ++next_obs;
  }
  return stats;
}

FractionRecord coupling_fraction(const CoupledPair& pair0,
                                 const SimConfig& config,
                                 const spectral2d::BallSpectrum& ball,
                                 const spectral2d::BallDomain& dom) {
  validate_config(config);
  SimConfig local = config;
  local.obs_times.clear();

  const int N = config.trajectories;
  std::vector<double> taus(N, kInf);
  std::vector<long> halvings(N, 0), rejects(N, 0);
  std::vector<char> stuck(N, 0);
  parallel_for(N, config.threads, [&](int i) {
    try {
      const TrajectoryStats st =
          simulate(pair0, local, ball, dom, nullptr, i);
      taus[i] = st.tau;
      halvings[i] = st.boundary_halvings;
      rejects[i] = st.rejected_steps;
    } catch (const StuckError&) {
      stuck[i] = 1;
    }
  });

  FractionRecord rec;
  rec.trajectories = N;
  double tau_sum = 0.0;
  for (int i = 0; i < N; ++i) {
    if (std::isfinite(taus[i])) {
      ++rec.coupled;
      tau_sum += taus[i];
    }
    rec.boundary_halvings += halvings[i];
    rec.rejected_steps += rejects[i];
    rec.stuck += stuck[i];
  }
  rec.fraction = static_cast<double>(rec.coupled) / N;
  rec.mean_tau = rec.coupled > 0 ? tau_sum / rec.coupled : kNaN;
  return rec;
}

CompareRecord shared_noise_compare(const CoupledPair& pair0,
                                   const SimConfig& config,
                                   const spectral2d::BallSpectrum& ball,
                                   const spectral2d::BallDomain& dom,
                                   double tol_path) {
  validate_config(config);
  const auto& space = dom.space;
  const double eps = default_eps(config, dom);
  const double sign = space.k >= 0.0 ? 1.0 : -1.0;
  const int N = config.trajectories;

  std::vector<double> path_min(N, kInf);
  std::vector<long> path_viol(N, 0), path_steps(N, 0);
  std::vector<char> path_tau_viol(N, 0), path_lead(N, 0);

  // The two interpair distances are compared the way the modified drift is
  // derived: one reflection-coupled pair supplies the adapted ingredients
  // (the drift functional F_t and the Brownian scalar along the pair axis),
  // and rho_std, rho_mod evolve as scalar Euler companions whose drifts
  // differ only by the sign-definite -4 tn_k(rho/2) term.  With a shared
  // increment and monotone update maps the ordering is exact step by step.
  // Freezing the curvature coefficients beyond rho_safe keeps the map
  // monotone; only k > 0 can push tn toward its pole.
  double rho_safe = kInf;
  if (space.k > 0.0) {
    const double sk = std::sqrt(space.k);
    const double tmax = std::sqrt(0.5 / ((space.n + 1) * config.dt));
    rho_safe = 2.0 / sk * std::atan(tmax / sk);
  }

  parallel_for(N, config.threads, [&](int p) {
    CoupledPair driver = pair0;
    driver.mode = Mode::standard;
    driver.coupled = false;
    const double rho0 = geom::distance(space, driver.x, driver.y);
    double rho_s = rho0, rho_m = rho0;
    bool alive_s = true, alive_m = true;
    double t = 0.0, tau_s = kInf, tau_m = kInf;
    std::uint64_t step_idx = 0;
    int consecutive_rejects = 0;

    while (t < config.T - 1e-12 && (alive_s || alive_m)) {
      const double dt_base = std::min(config.dt, config.T - t);
      const geom::Vec noise = draw_noise(config, p, step_idx++, space.n);
      const double f_now = pair_f(ball, dom, driver.x, driver.y);
      const auto out =
          step(driver, dt_base, noise, ball, dom, 0.0, config.max_halvings);
      driver = out.pair;
      t += out.advanced;
      if (out.rejected) {
        if (++consecutive_rejects >= config.max_halvings)
          throw StuckError("shared_noise_compare: pair pinned at the wall");
        continue;  // companions freeze with the driver
      }
      consecutive_rejects = 0;

      const double dt_eff = out.advanced;
      const double dw = -2.0 * std::numbers::sqrt2 *
                        noise[space.n - 1] * std::sqrt(dt_eff);
      const auto advance = [&](double rho, bool modified) {
        const double rc = std::min(rho, rho_safe);
        double b = geom::index_form_sum(space, rc) + 2.0 * f_now;
        if (modified) b -= 4.0 * geom::tn(space.k, rc / 2.0);
        return rho + b * dt_eff + dw;
      };
      if (alive_s) {
        rho_s = advance(rho_s, false);
        if (rho_s < eps) { rho_s = 0.0; alive_s = false; tau_s = t; }
      }
      if (alive_m) {
        rho_m = advance(rho_m, true);
        if (rho_m < eps) { rho_m = 0.0; alive_m = false; tau_m = t; }
      }
      const double gap = sign * (rho_s - rho_m);
      path_min[p] = std::min(path_min[p], gap);
      if (gap < -tol_path) ++path_viol[p];
      ++path_steps[p];
    }
    // tau ordering: the dominated process must not merge strictly later
    const double tau_lead = sign > 0 ? tau_m : tau_s;
    const double tau_lag = sign > 0 ? tau_s : tau_m;
    if (tau_lag < tau_lead) path_tau_viol[p] = 1;
    if (std::isfinite(tau_lead)) path_lead[p] = 1;
  });

  CompareRecord rec;
  rec.paths = N;
  rec.sign = sign;
  rec.min_ordered_gap = kInf;
  for (int p = 0; p < N; ++p) {
    rec.total_steps += path_steps[p];
    rec.violating_steps += path_viol[p];
    rec.min_ordered_gap = std::min(rec.min_ordered_gap, path_min[p]);
    rec.tau_violations += path_tau_viol[p];
    rec.lead_coupled += path_lead[p];
  }
  return rec;
}

SuperRecord supermartingale_check(const CoupledPair& pair0,
                                  const SimConfig& config,
                                  const spectral2d::BallSpectrum& ball,
                                  const spectral2d::BallDomain& dom,
                                  const spectral1d::Model1D& model,
                                  const spectral1d::Spectrum1D& spec1d) {
  validate_config(config);
  if (config.obs_times.empty())
    throw DomainError("supermartingale_check: no observation times");
  const spectral1d::PhiEvaluator phi(model, spec1d);
  const auto& space = dom.space;

  SuperRecord rec;
  rec.gap_model = spec1d.lambda2 - spec1d.lambda1;
  const double rho0 = geom::distance(space, pair0.x, pair0.y);
  rec.phi0 = phi.at(std::min(0.5 * rho0, phi.x_max()));

  const int N = config.trajectories;
  const int M = static_cast<int>(config.obs_times.size());
  std::vector<double> vals(static_cast<std::size_t>(N) * M, 0.0);
  std::vector<double> taus(N, kInf);
  parallel_for(N, config.threads, [&](int i) {
    const TrajectoryStats st = simulate(pair0, config, ball, dom, &phi, i);
    for (int j = 0; j < M; ++j) vals[static_cast<std::size_t>(i) * M + j] =
        st.samples[j].phi;
    taus[i] = st.tau;
  });

  rec.at.resize(M);
  rec.pass = true;
  std::vector<double> log_means;
  std::vector<double> fit_t;
  for (int j = 0; j < M; ++j) {
    auto& a = rec.at[j];
    a.t = config.obs_times[j];
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < N; ++i) {
      const double v = vals[static_cast<std::size_t>(i) * M + j];
      sum += v;
      sumsq += v * v;
    }
    a.mean = sum / N;
    a.se = sample_se(sum, sumsq, N);
    for (int i = 0; i < N; ++i)
      if (taus[i] > a.t) ++a.uncoupled;
    if (a.uncoupled < 100)
      throw InsufficientSamplesError(
          "supermartingale_check: fewer than 100 uncoupled paths");
    const double se_rel = a.mean > 0.0 ? a.se / a.mean : 0.0;
    a.bound = std::exp(-rec.gap_model * a.t) * rec.phi0 * (1.0 + 3.0 * se_rel);
    a.pass = a.mean <= a.bound;
    rec.pass = rec.pass && a.pass;
    if (a.mean > 0.0 && a.t > 0.0) {
      log_means.push_back(std::log(a.mean / rec.phi0));
      fit_t.push_back(a.t);
    }
  }
  if (fit_t.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int n = static_cast<int>(fit_t.size());
    for (int i = 0; i < n; ++i) {
      sx += fit_t[i];
      sy += log_means[i];
      sxx += fit_t[i] * fit_t[i];
      sxy += fit_t[i] * log_means[i];
    }
    rec.fitted_rate = -(n * sxy - sx * sy) / (n * sxx - sx * sx);
  } else if (fit_t.size() == 1) {
    rec.fitted_rate = -log_means[0] / fit_t[0];
  }
  return rec;
}

FkRecord feynman_kac_check(const geom::Point& x0, const SimConfig& config,
                           const spectral2d::BallSpectrum& ball,
                           const spectral2d::BallDomain& dom) {
  validate_config(config);
  if (config.obs_times.empty())
    throw DomainError("feynman_kac_check: no observation times");
  const auto& space = dom.space;
  if (!(space.k > 0.0) ||
      std::abs(2.0 * dom.R - 3.14159265358979323846 / std::sqrt(space.k)) >
          1e-9)
    throw DomainError(
        "feynman_kac_check: closed-form observable needs the hemisphere");

  const double sqk = std::sqrt(space.k);
  auto v0 = [&](const geom::Point& p) { return sqk * p.coords[0]; };

  FkRecord rec;
  rec.gap = ball.lambda2 - ball.lambda1;
  rec.v0 = v0(x0);

  const int N = config.trajectories;
  const int M = static_cast<int>(config.obs_times.size());
  std::vector<double> vals(static_cast<std::size_t>(N) * M, 0.0);

  parallel_for(N, config.threads, [&](int i) {
    geom::Point p = x0;
    double t = 0.0;
    std::size_t next_obs = 0;
    std::uint64_t step_idx = 0;
    int consecutive_rejects = 0;
    const auto& obs = config.obs_times;
    while (next_obs < obs.size() && obs[next_obs] <= 1e-12) {
      vals[static_cast<std::size_t>(i) * M + next_obs] = v0(p);
      ++next_obs;
    }
    while (t < config.T - 1e-12 && next_obs < obs.size()) {
      double dt_base = std::min(config.dt, obs[next_obs] - t);
      dt_base = std::min(dt_base, config.T - t);
      const geom::Vec noise = draw_noise(config, i, step_idx++, space.n);

      // drift and an isotropic frame at the current point
      const RadialInfo info = radial_at(dom, p);
      const geom::Vec b = 2.0 * grad_omega(dom, ball, info);
      geom::Vec along;
      if (info.r > 1e-12) {
        along = info.outward;
      } else {
        geom::Vec axis = geom::Vec::Zero(space.ambient_dim());
        axis[space.k < 0.0 ? 1 : 0] = 1.0;
        along = geom::tangentialize(space, p, axis);
        along /= geom::norm(space, along);
      }
      const auto frame = geom::adapted_frame(space, p, along);
      geom::Vec w = geom::Vec::Zero(space.ambient_dim());
      for (int d = 0; d < space.n; ++d) w += noise[d] * frame.col(d);
      w *= std::sqrt(2.0);

      bool accepted = false;
      for (int j = 0; j <= config.max_halvings; ++j) {
        const double dt_eff = std::ldexp(dt_base, -j);
        geom::Point q;
        try {
          q = geom::exp_map(space,
                            {p, geom::Vec(b * dt_eff + w * std::sqrt(dt_eff))});
        } catch (const DomainError&) {
          continue;
        }
        if (geom::distance(space, q, dom.center()) >= dom.R) continue;
        p = q;
        t += dt_eff;
        accepted = true;
        break;
      }
      if (!accepted) {
        t += dt_base;
        if (++consecutive_rejects >= config.max_halvings)
          throw StuckError("feynman_kac_check: path pinned at the wall");
      } else {
        consecutive_rejects = 0;
      }
      while (next_obs < obs.size() && t >= obs[next_obs] - 1e-12) {
        vals[static_cast<std::size_t>(i) * M + next_obs] = v0(p);
        ++next_obs;
      }
    }
  });

  rec.at.resize(M);
  rec.pass = true;
  for (int j = 0; j < M; ++j) {
    auto& a = rec.at[j];
    a.t = config.obs_times[j];
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < N; ++i) {
      const double v = vals[static_cast<std::size_t>(i) * M + j];
      sum += v;
      sumsq += v * v;
    }
    a.estimate = sum / N;
    a.se = sample_se(sum, sumsq, N);
    a.reference = std::exp(-rec.gap * a.t) * rec.v0;
    a.pass = std::abs(a.estimate - a.reference) <= 3.0 * a.se;
    rec.pass = rec.pass && a.pass;
  }
  return rec;
}

GenRhoRecord generator_oracle_rho(const geom::Point& x0, const geom::Point& y0,
                                  const spectral2d::BallSpectrum& ball,
                                  const spectral2d::BallDomain& dom, double h,
                                  int n_samples, std::uint64_t seed) {
  const auto& space = dom.space;
  const double rho0 = geom::distance(space, x0, y0);
  GenRhoRecord rec;
  rec.drift_ref = geom::index_form_sum(space, rho0) + 2.0 * pair_f(ball, dom, x0, y0);

  CoupledPair pair0{x0, y0, Mode::standard, false, 0.0};
  double s1 = 0, s2 = 0, q1 = 0, q2 = 0;
  int used = 0;
  for (int i = 0; i < n_samples; ++i) {
    rng::Stream st(seed, i, 0, rng::kDomainNoise);
    geom::Vec noise(space.n);
    for (int d = 0; d < space.n; ++d) noise[d] = st.next_normal();
    const StepOutcome out = step(pair0, h, noise, ball, dom, 0.0, 20);
    if (out.rejected || out.halvings > 0) continue;  // would bias the h scale
    const double dr = geom::distance(space, out.pair.x, out.pair.y) - rho0;
    s1 += dr / h;
    s2 += (dr / h) * dr;  // dr^2 / h accumulated without overflow
    q1 += dr * dr / h;
    q2 += (dr * dr / h) * (dr * dr / h);
    ++used;
  }
  rec.samples = used;
  rec.drift_est = s1 / used;
  rec.drift_se = sample_se(s1, s2 / h, used);
  rec.qv_est = q1 / used;
  rec.qv_se = sample_se(q1, q2, used);
  rec.pass_drift = std::abs(rec.drift_est - rec.drift_ref) <= 3.0 * rec.drift_se;
  rec.pass_qv = std::abs(rec.qv_est - rec.qv_ref) <= 3.0 * rec.qv_se;
  return rec;
}

GenFRecord generator_oracle_f(const geom::Point& x0, const geom::Point& y0,
                              const spectral2d::BallSpectrum& ball,
                              const spectral2d::BallDomain& dom, double h,
                              int n_samples, std::uint64_t seed) {
  const auto& space = dom.space;
  GenFRecord rec;
  rec.drift_ref = f_drift_closed_form(dom, ball, x0, y0);
  const double f0 = pair_f(ball, dom, x0, y0);

  CoupledPair pair0{x0, y0, Mode::modified, false, 0.0};
  double s1 = 0, s2 = 0;
  int used = 0;
  for (int i = 0; i < n_samples; ++i) {
    rng::Stream st(seed, i, 0, rng::kDomainNoise);
    geom::Vec noise(space.n);
    for (int d = 0; d < space.n; ++d) noise[d] = st.next_normal();
    const StepOutcome out = step(pair0, h, noise, ball, dom, 0.0, 20);
    if (out.rejected || out.halvings > 0) continue;
    const double df =
        (pair_f(ball, dom, out.pair.x, out.pair.y) - f0) / h;
    s1 += df;
    s2 += df * df;
    ++used;
  }
  rec.samples = used;
  rec.drift_est = s1 / used;
  rec.drift_se = sample_se(s1, s2, used);
  rec.pass = std::abs(rec.drift_est - rec.drift_ref) <= 3.0 * rec.drift_se;
  return rec;
}

MonitorRecord modulus_preservation_monitor(
    const CoupledPair& pair0, const SimConfig& config,
    const spectral2d::BallSpectrum& ball, const spectral2d::BallDomain& dom,
    const spectral1d::Model1D& model, const spectral1d::Spectrum1D& spec1d) {
  validate_config(config);
  const spectral1d::PsiEvaluator psi(model, spec1d);
  const auto& space = dom.space;
  const double eps = default_eps(config, dom);
  const double window_hi = 2.0 * dom.R - eps;
  const int N = config.trajectories;

  std::vector<double> maxg(N, -kInf), merge_g(N, 0.0);
  std::vector<char> merged(N, 0);

  parallel_for(N, config.threads, [&](int i) {
    CoupledPair pair = pair0;
    pair.mode = Mode::modified;
    pair.coupled = false;
    pair.t = 0.0;
    std::uint64_t step_idx = 0;
    int consecutive_rejects = 0;
    while (pair.t < config.T - 1e-12) {
      const double dt_base = std::min(config.dt, config.T - pair.t);
      const geom::Vec noise =
          draw_noise(config, i, step_idx++, space.n);
      // merging handled here so G is still measurable at the merge event
      const StepOutcome out =
          step(pair, dt_base, noise, ball, dom, 0.0, config.max_halvings);
      if (out.rejected) {
        if (++consecutive_rejects >= config.max_halvings)
          throw StuckError("modulus monitor: pair pinned at the wall");
        pair = out.pair;
        continue;
      }
      consecutive_rejects = 0;
      pair = out.pair;
      const double rho = geom::distance(space, pair.x, pair.y);
      if (rho < eps) {
        merge_g[i] = std::abs(pair_f(ball, dom, pair.x, pair.y) -
                              2.0 * psi.at(0.5 * rho));
        merged[i] = 1;
        break;
      }
      if (rho < window_hi) {
        const double g =
            pair_f(ball, dom, pair.x, pair.y) - 2.0 * psi.at(0.5 * rho);
        maxg[i] = std::max(maxg[i], g);
      }
    }
  });

  MonitorRecord rec;
  rec.paths = N;
  for (int i = 0; i < N; ++i) {
    rec.max_g = std::max(rec.max_g, maxg[i]);
    if (merged[i]) {
      ++rec.coupled;
      rec.max_g_at_merge = std::max(rec.max_g_at_merge, merge_g[i]);
    }
  }
  return rec;
}

}  // namespace gaplab::coupling

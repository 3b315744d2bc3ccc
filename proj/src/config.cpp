#include "gaplab/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "gaplab/errors.hpp"

namespace gaplab::harness {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Token {
  std::string value;
  int line = 0;
};

[[noreturn]] void parse_fail(int line, const std::string& what) {
  throw ParseError("line " + std::to_string(line) + ": " + what);
}

double to_double(const Token& t, const std::string& key) {
  const char* s = t.value.c_str();
  char* end = nullptr;
  const double v = std::strtod(s, &end);
  if (end == s || *end != '\0')
    parse_fail(t.line, key + ": not a number: '" + t.value + "'");
  return v;
}

long to_int(const Token& t, const std::string& key) {
  const char* s = t.value.c_str();
  char* end = nullptr;
  const long v = std::strtol(s, &end, 10);
  if (end == s || *end != '\0')
    parse_fail(t.line, key + ": not an integer: '" + t.value + "'");
  return v;
}

bool to_bool(const Token& t, const std::string& key) {
  if (t.value == "1" || t.value == "true") return true;
  if (t.value == "0" || t.value == "false") return false;
  parse_fail(t.line, key + ": expected 0 or 1, got '" + t.value + "'");
}

std::vector<double> to_double_list(const Token& t, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(t.value);
  std::string item;
  while (std::getline(ss, item, ','))
    out.push_back(to_double({item, t.line}, key));
  if (out.empty()) parse_fail(t.line, key + ": empty list");
  return out;
}

std::vector<int> to_int_list(const Token& t, const std::string& key) {
  std::vector<int> out;
  std::stringstream ss(t.value);
  std::string item;
  while (std::getline(ss, item, ','))
    out.push_back(static_cast<int>(to_int({item, t.line}, key)));
  if (out.empty()) parse_fail(t.line, key + ": empty list");
  return out;
}

Potential parse_potential(const Token& t) {
  const std::string& s = t.value;
  if (s == "0") return Potential::zero();
  if (s.rfind("poly:", 0) == 0) {
    std::vector<double> coeffs = to_double_list({s.substr(5), t.line}, "V");
    const Potential p = Potential::polynomial(coeffs);
    if (!p.is_even())
      throw ValidationError("V: potential must be even (odd coefficient)");
    return p;
  }
  if (s.rfind("file:", 0) == 0) {
    const std::string path = s.substr(5);
    std::ifstream in(path);
    if (!in) throw IoError("V: cannot open sample file '" + path + "'");
    std::vector<double> xs, vs;
    double a, b;
    while (in >> a >> b) {
      xs.push_back(a);
      vs.push_back(b);
    }
    if (!in.eof())
      parse_fail(t.line, "V: malformed sample file '" + path + "'");
    if (xs.size() < 4)
      parse_fail(t.line, "V: sample file '" + path + "' needs >= 4 rows");
    Eigen::ArrayXd x(xs.size()), v(vs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      x[i] = xs[i];
      v[i] = vs[i];
    }
    return Potential::sampled(x, v);
  }
  parse_fail(t.line, "V: expected 0, poly:c0,c1,..., or file:path");
}

Kind parse_kind(const Token& t) {
  if (t.value == "solve1d") return Kind::solve1d;
  if (t.value == "solveball") return Kind::solveball;
  if (t.value == "verify") return Kind::verify;
  if (t.value == "couple") return Kind::couple;
  if (t.value == "sweep") return Kind::sweep;
  parse_fail(t.line, "kind: unknown experiment '" + t.value + "'");
}

CoupleExperiment parse_experiment(const Token& t) {
  if (t.value == "fraction") return CoupleExperiment::fraction;
  if (t.value == "compare") return CoupleExperiment::compare;
  if (t.value == "supermartingale") return CoupleExperiment::supermartingale;
  if (t.value == "feynman_kac") return CoupleExperiment::feynman_kac;
  if (t.value == "generators") return CoupleExperiment::generators;
  if (t.value == "monitor") return CoupleExperiment::monitor;
  parse_fail(t.line, "experiment: unknown experiment '" + t.value + "'");
}

bool needs_ball(Kind k) {
  return k == Kind::solveball || k == Kind::verify || k == Kind::couple;
}

void validate_one(const ExperimentConfig& c) {
  if (c.n < 2) throw ValidationError("n must be >= 2");
  if (c.kind == Kind::solve1d) {
    if (!std::isfinite(c.D)) throw ValidationError("solve1d requires D");
    if (!(c.D > 0.0)) throw ValidationError("D must be positive");
    if (c.k > 0.0 && c.D >= kPi / std::sqrt(c.k))
      throw ValidationError(
          "the interval only fits below the conjugate radius: D < pi/sqrt(k)");
  }
  if (needs_ball(c.kind)) {
    if (c.n != 2) throw ValidationError("geodesic balls are solved for n = 2");
    if (!std::isfinite(c.R)) throw ValidationError(
        std::string(kind_name(c.kind)) + " requires R");
    if (!(c.R > 0.0)) throw ValidationError("R must be positive");
    if (c.k > 0.0 && c.R > kPi / (2.0 * std::sqrt(c.k)) + 1e-12)
      throw ValidationError(
          "the ball must fit in the hemisphere: R <= pi/(2 sqrt(k))");
  }
  if (!(c.sim.dt > 0.0)) throw ValidationError("dt must be positive");
  if (c.sim.T < 0.0) throw ValidationError("T must be nonnegative");
  if (c.sim.trajectories < 1)
    throw ValidationError("trajectories must be >= 1");
  if (c.sim.max_halvings < 1)
    throw ValidationError("max_halvings must be >= 1");
  for (std::size_t i = 0; i < c.sim.obs_times.size(); ++i) {
    const double t = c.sim.obs_times[i];
    if (t < 0.0 || t > c.sim.T)
      throw ValidationError("obs_times must lie in [0, T]");
    if (i > 0 && t <= c.sim.obs_times[i - 1])
      throw ValidationError("obs_times must ascend strictly");
  }
  if (c.pairs < 1) throw ValidationError("pairs must be >= 1");
  if (!(c.h_gen > 0.0)) throw ValidationError("h_gen must be positive");
  for (std::size_t i = 1; i < c.refine_grids.size(); ++i)
    if (c.refine_grids[i] <= c.refine_grids[i - 1])
      throw ValidationError("refine_grids must ascend");
  if (c.kind == Kind::couple) {
    const bool pairwise = c.experiment != CoupleExperiment::feynman_kac;
    if (pairwise) {
      if (!std::isfinite(c.xi0))
        throw ValidationError("couple requires xi0 (half start distance)");
      if (!(c.xi0 > 0.0) || c.xi0 >= c.R)
        throw ValidationError("xi0 must lie in (0, R)");
    } else {
      if (!std::isfinite(c.x0_r))
        throw ValidationError("feynman_kac requires x0_r");
      if (c.x0_r < 0.0 || c.x0_r >= c.R)
        throw ValidationError("x0_r must lie in [0, R)");
    }
    if ((c.experiment == CoupleExperiment::supermartingale ||
         c.experiment == CoupleExperiment::feynman_kac) &&
        c.sim.obs_times.empty())
      throw ValidationError(std::string(experiment_name(c.experiment)) +
                            " requires obs_times");
  }
}

}  // namespace

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::solve1d: return "solve1d";
    case Kind::solveball: return "solveball";
    case Kind::verify: return "verify";
    case Kind::couple: return "couple";
    case Kind::sweep: return "sweep";
  }
  return "?";
}

const char* experiment_name(CoupleExperiment e) {
  switch (e) {
    case CoupleExperiment::fraction: return "fraction";
    case CoupleExperiment::compare: return "compare";
    case CoupleExperiment::supermartingale: return "supermartingale";
    case CoupleExperiment::feynman_kac: return "feynman_kac";
    case CoupleExperiment::generators: return "generators";
    case CoupleExperiment::monitor: return "monitor";
  }
  return "?";
}

double model_width(double k, double R) {
  const double diam = 2.0 * R;
  if (k > 0.0) return std::min(diam, kPi / std::sqrt(k) - 1e-6);
  return diam;
}

Potential paired_vtilde(double k, const Potential& V,
                        const std::string& v_text) {
  (void)v_text;
  if (k == 0.0) return V;  // flat transplantation r -> s is exact
  return Potential::zero();
}

ExperimentConfig parse_config(const std::string& text) {
  // tokenize: whitespace-separated KEY=VALUE, '#' comments
  std::map<std::string, Token> kv;
  std::vector<std::pair<std::string, Token>> cells_raw;
  std::istringstream stream(text);
  std::string line;
  int lineno = 0;
  while (std::getline(stream, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) {
      const std::size_t eq = tok.find('=');
      if (eq == std::string::npos || eq == 0)
        parse_fail(lineno, "expected KEY=VALUE, got '" + tok + "'");
      const std::string key = tok.substr(0, eq);
      const Token val{tok.substr(eq + 1), lineno};
      if (key.rfind("cell", 0) == 0 && key.size() > 4 &&
          std::isdigit(static_cast<unsigned char>(key[4]))) {
        cells_raw.emplace_back(key, val);
        continue;
      }
      if (!kv.emplace(key, val).second)
        parse_fail(lineno, "duplicate key '" + key + "'");
    }
  }
  for (std::size_t i = 0; i < cells_raw.size(); ++i)
    for (std::size_t j = i + 1; j < cells_raw.size(); ++j)
      if (cells_raw[i].first == cells_raw[j].first)
        parse_fail(cells_raw[j].second.line,
                   "duplicate key '" + cells_raw[j].first + "'");

  ExperimentConfig cfg;
  cfg.raw_text = text;
  std::vector<int> n_list;
  std::vector<double> k_list, r_list, d_list;
  std::vector<std::string> v_list;
  int v_list_line = 0;

  auto take = [&](const char* key) -> const Token* {
    const auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };

  if (const Token* t = take("kind")) cfg.kind = parse_kind(*t);
  else throw ParseError("line 1: missing required key 'kind'");

  static const char* known[] = {
      "kind", "n", "k", "D", "R", "V", "grid", "grid1d", "dt", "T",
      "trajectories", "seed", "eps_couple", "max_halvings", "obs_times",
      "threads", "experiment", "xi0", "x0_r", "x0_theta", "h_gen", "pairs",
      "refine_grids", "ode_orders", "expect_lambda1", "atol_lambda1",
      "expect_lambda2", "atol_lambda2", "expect_flat_gap", "expect_bessel",
      "rtol", "gap_margin_min", "condition_min", "modulus_tol",
      "min_coupled_fraction", "tol_path", "monitor_tol", "order_tol",
      "cell_kind", "n_list", "k_list", "R_list", "D_list", "V_list"};
  for (const auto& [key, tok] : kv) {
    bool ok = false;
    for (const char* kn : known) ok = ok || key == kn;
    if (!ok) parse_fail(tok.line, "unknown key '" + key + "'");
  }

  if (const Token* t = take("n")) cfg.n = static_cast<int>(to_int(*t, "n"));
  if (const Token* t = take("k")) cfg.k = to_double(*t, "k");
  if (const Token* t = take("D")) cfg.D = to_double(*t, "D");
  if (const Token* t = take("R")) cfg.R = to_double(*t, "R");
  if (const Token* t = take("V")) {
    cfg.V = parse_potential(*t);
    cfg.v_text = t->value;
  }
  if (const Token* t = take("grid"))
    cfg.grid = static_cast<int>(to_int(*t, "grid"));
  if (const Token* t = take("grid1d"))
    cfg.grid1d = static_cast<int>(to_int(*t, "grid1d"));
  if (const Token* t = take("dt")) cfg.sim.dt = to_double(*t, "dt");
  if (const Token* t = take("T")) cfg.sim.T = to_double(*t, "T");
  if (const Token* t = take("trajectories"))
    cfg.sim.trajectories = static_cast<int>(to_int(*t, "trajectories"));
  if (const Token* t = take("seed"))
    cfg.sim.seed = static_cast<std::uint64_t>(to_int(*t, "seed"));
  if (const Token* t = take("eps_couple"))
    cfg.sim.eps_couple = to_double(*t, "eps_couple");
  if (const Token* t = take("max_halvings"))
    cfg.sim.max_halvings = static_cast<int>(to_int(*t, "max_halvings"));
  if (const Token* t = take("obs_times"))
    cfg.sim.obs_times = to_double_list(*t, "obs_times");
  if (const Token* t = take("threads"))
    cfg.sim.threads = static_cast<int>(to_int(*t, "threads"));
  if (const Token* t = take("experiment"))
    cfg.experiment = parse_experiment(*t);
  if (const Token* t = take("xi0")) cfg.xi0 = to_double(*t, "xi0");
  if (const Token* t = take("x0_r")) cfg.x0_r = to_double(*t, "x0_r");
  if (const Token* t = take("x0_theta"))
    cfg.x0_theta = to_double(*t, "x0_theta");
  if (const Token* t = take("h_gen")) cfg.h_gen = to_double(*t, "h_gen");
  if (const Token* t = take("pairs"))
    cfg.pairs = static_cast<int>(to_int(*t, "pairs"));
  if (const Token* t = take("refine_grids"))
    cfg.refine_grids = to_int_list(*t, "refine_grids");
  if (const Token* t = take("ode_orders"))
    cfg.ode_orders = static_cast<int>(to_int(*t, "ode_orders"));
  if (const Token* t = take("expect_lambda1"))
    cfg.expect_lambda1 = to_double(*t, "expect_lambda1");
  if (const Token* t = take("atol_lambda1"))
    cfg.atol_lambda1 = to_double(*t, "atol_lambda1");
  if (const Token* t = take("expect_lambda2"))
    cfg.expect_lambda2 = to_double(*t, "expect_lambda2");
  if (const Token* t = take("atol_lambda2"))
    cfg.atol_lambda2 = to_double(*t, "atol_lambda2");
  if (const Token* t = take("expect_flat_gap"))
    cfg.expect_flat_gap = to_bool(*t, "expect_flat_gap");
  if (const Token* t = take("expect_bessel"))
    cfg.expect_bessel = to_bool(*t, "expect_bessel");
  if (const Token* t = take("rtol")) cfg.rtol = to_double(*t, "rtol");
  if (const Token* t = take("gap_margin_min"))
    cfg.gap_margin_min = to_double(*t, "gap_margin_min");
  if (const Token* t = take("condition_min"))
    cfg.condition_min = to_double(*t, "condition_min");
  if (const Token* t = take("modulus_tol"))
    cfg.modulus_tol = to_double(*t, "modulus_tol");
  if (const Token* t = take("min_coupled_fraction"))
    cfg.min_coupled_fraction = to_double(*t, "min_coupled_fraction");
  if (const Token* t = take("tol_path"))
    cfg.tol_path = to_double(*t, "tol_path");
  if (const Token* t = take("monitor_tol"))
    cfg.monitor_tol = to_double(*t, "monitor_tol");
  if (const Token* t = take("order_tol"))
    cfg.order_tol = to_double(*t, "order_tol");
  if (const Token* t = take("cell_kind")) {
    cfg.cell_kind = parse_kind(*t);
    if (cfg.cell_kind == Kind::sweep)
      parse_fail(t->line, "cell_kind: sweeps do not nest");
  }
  if (const Token* t = take("n_list")) {
    n_list = to_int_list(*t, "n_list");
  }
  if (const Token* t = take("k_list")) k_list = to_double_list(*t, "k_list");
  if (const Token* t = take("R_list")) r_list = to_double_list(*t, "R_list");
  if (const Token* t = take("D_list")) d_list = to_double_list(*t, "D_list");
  if (const Token* t = take("V_list")) {
    v_list_line = t->line;
    std::stringstream ss(t->value);
    std::string item;
    while (std::getline(ss, item, ';')) v_list.push_back(item);
    if (v_list.empty()) parse_fail(t->line, "V_list: empty list");
  }

  const bool has_lists = !n_list.empty() || !k_list.empty() ||
                         !r_list.empty() || !d_list.empty() || !v_list.empty();
  if (cfg.kind != Kind::sweep && (has_lists || !cells_raw.empty()))
    throw ParseError("cell and list keys are only valid for kind=sweep");
  if (cfg.kind == Kind::sweep && has_lists && !cells_raw.empty())
    throw ParseError("use either cellN entries or *_list keys, not both");

  if (cfg.kind == Kind::sweep) {
    auto base_cell = [&]() {
      ExperimentConfig cell = cfg;
      cell.kind = cfg.cell_kind;
      cell.cells.clear();
      cell.raw_text.clear();
      return cell;
    };
    if (!cells_raw.empty()) {
      for (const auto& [key, tok] : cells_raw) {
        ExperimentConfig cell = base_cell();
        std::stringstream ss(tok.value);
        std::string item;
        while (std::getline(ss, item, ';')) {
          const std::size_t colon = item.find(':');
          if (colon == std::string::npos || colon == 0)
            parse_fail(tok.line, key + ": expected KEY:VALUE, got '" + item +
                                     "'");
          const std::string ck = item.substr(0, colon);
          const Token cv{item.substr(colon + 1), tok.line};
          if (ck == "n") cell.n = static_cast<int>(to_int(cv, key));
          else if (ck == "k") cell.k = to_double(cv, key);
          else if (ck == "R") cell.R = to_double(cv, key);
          else if (ck == "D") cell.D = to_double(cv, key);
          else if (ck == "V") {
            cell.V = parse_potential(cv);
            cell.v_text = cv.value;
          } else if (ck == "xi0") cell.xi0 = to_double(cv, key);
          else if (ck == "x0_r") cell.x0_r = to_double(cv, key);
          else parse_fail(tok.line, key + ": unknown cell key '" + ck + "'");
        }
        cfg.cells.push_back(std::move(cell));
      }
    } else if (has_lists) {
      if (n_list.empty()) n_list = {cfg.n};
      if (k_list.empty()) k_list = {cfg.k};
      if (v_list.empty()) v_list = {cfg.v_text};
      const bool interval = cfg.cell_kind == Kind::solve1d;
      std::vector<double> size_list = interval ? d_list : r_list;
      if (size_list.empty())
        size_list = {interval ? cfg.D : cfg.R};
      for (int n : n_list)
        for (double k : k_list)
          for (double size : size_list)
            for (const std::string& v : v_list) {
              ExperimentConfig cell = base_cell();
              cell.n = n;
              cell.k = k;
              if (interval) cell.D = size;
              else cell.R = size;
              cell.V = parse_potential({v, v_list_line});
              cell.v_text = v;
              cfg.cells.push_back(std::move(cell));
            }
    }
    for (const ExperimentConfig& cell : cfg.cells) validate_one(cell);
  }

  // a sweep shell skips the model checks (its cells carry them) but still
  // owns the shared numeric knobs
  validate_one(cfg);
  return cfg;
}

}  // namespace gaplab::harness

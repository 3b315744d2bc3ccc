// Acceptance gate.  Eleven pinned criteria, each a configuration file run
// through the harness exactly as the CLI would run it, each with a wall
// budget.  One line per criterion; the exit status is nonzero unless every
// criterion passes inside its budget.  Reports land in ./acceptance-reports
// under content-hash names, so reruns never clobber earlier evidence.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "gaplab/harness.hpp"

namespace {

struct Criterion {
  const char* file;
  const char* label;
  double budget_s;
};

constexpr Criterion kTable[] = {
    {"criterion01.cfg", "flat interval gap equals 3 pi^2 / D^2", 1.0},
    {"criterion02.cfg", "hemisphere eigenvalues are 2 and 6", 10.0},
    {"criterion03.cfg", "disk eigenvalues sit at squared Bessel zeros", 10.0},
    {"criterion04.cfg", "ball gap dominates the 1-D model gap", 120.0},
    {"criterion05.cfg", "log-concavity defect small and shrinking", 300.0},
    {"criterion06.cfg", "psi/ratio ODE residuals of order two", 30.0},
    {"criterion07.cfg", "hemisphere pairs couple by the horizon", 300.0},
    {"criterion08.cfg", "shared-noise distances stay ordered", 300.0},
    {"criterion09.cfg", "ratio profile decays at the model gap", 600.0},
    {"criterion10.cfg", "excited observable follows its decay law", 600.0},
    {"criterion11.cfg", "one-step generators match closed forms", 900.0},
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main() {
  bool all = true;
  int id = 0;
  for (const Criterion& c : kTable) {
    ++id;
    const auto t0 = std::chrono::steady_clock::now();
    bool pass = false;
    std::string note;
    try {
      const gaplab::harness::ExperimentConfig cfg =
          gaplab::harness::parse_config(
              slurp(std::string(GAPLAB_CONFIG_DIR) + "/" + c.file));
      const gaplab::harness::VerificationReport rep =
          gaplab::harness::run(cfg, "acceptance-reports");
      gaplab::harness::emit(rep, "acceptance-reports");
      pass = rep.all_pass();
      if (!pass) {
        note = "  failing:";
        for (const auto& a : rep.assertions)
          if (a.enabled && !a.pass) note += " " + a.name;
      }
    } catch (const std::exception& e) {
      note = std::string("  error: ") + e.what();
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    const bool in_budget = elapsed <= c.budget_s;
    if (!in_budget) note += "  over budget";
    const bool ok = pass && in_budget;
    all = all && ok;
    std::printf("criterion %02d  %s  %7.1fs of %5.0fs  %s%s\n", id,
                ok ? "pass" : "FAIL", elapsed, c.budget_s, c.label,
                note.c_str());
    std::fflush(stdout);
  }
  std::printf("%s\n", all ? "ACCEPTANCE: PASS" : "ACCEPTANCE: FAIL");
  return all ? 0 : 1;
}

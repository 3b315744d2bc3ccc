// Command-line front end.  Each subcommand runs one experiment kind from a
// key=value configuration file and persists a content-addressed report plus
// its CSV and plot attachments into --out.  Exit status 0 means every
// enabled assertion passed; 1 means at least one failed; 2 means the
// configuration was rejected before anything ran.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "gaplab/errors.hpp"
#include "gaplab/harness.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw gaplab::IoError("cannot read config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void print_assertions(const gaplab::harness::VerificationReport& rep) {
  for (const auto& a : rep.assertions) {
    if (!a.enabled) {
      std::printf("[skip] %s\n", a.name.c_str());
      continue;
    }
    std::printf("[%s] %-28s", a.pass ? "pass" : "FAIL", a.name.c_str());
    if (std::isfinite(a.value)) std::printf("  value=%.10g", a.value);
    if (std::isfinite(a.threshold))
      std::printf("  threshold=%.10g", a.threshold);
    if (!a.detail.empty()) std::printf("  (%s)", a.detail.c_str());
    std::printf("\n");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for spectral gap comparison on balls"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  static const char* kinds[] = {"solve1d", "solveball", "verify", "couple",
                                "sweep"};
  static const char* blurbs[] = {
      "1-D comparison spectrum on an interval",
      "Dirichlet spectrum of a geodesic ball",
      "inequality checkers for one ball/model pair",
      "trajectory experiments on coupled diffusions",
      "a family of cells run concurrently"};
  for (int i = 0; i < 5; ++i) {
    CLI::App* sub = app.add_subcommand(kinds[i], blurbs[i]);
    sub->add_option("--config", config_path, "key=value experiment file")
        ->required();
    sub->add_option("--out", out_dir, "report directory (append-only)")
        ->required();
    sub->add_option("--seed", seed, "override the configured seed");
  }

  CLI11_PARSE(app, argc, argv);
  CLI::App* sub = app.get_subcommands().front();

  try {
    gaplab::harness::ExperimentConfig cfg =
        gaplab::harness::parse_config(slurp(config_path));
    if (sub->get_name() != gaplab::harness::kind_name(cfg.kind)) {
      std::fprintf(stderr, "error: config is kind=%s but subcommand is %s\n",
                   gaplab::harness::kind_name(cfg.kind),
                   sub->get_name().c_str());
      return 2;
    }
    if (sub->count("--seed") > 0) {
      cfg.sim.seed = seed;
      for (auto& cell : cfg.cells) cell.sim.seed = seed;
    }

    const gaplab::harness::VerificationReport rep =
        gaplab::harness::run(cfg, out_dir);
    const gaplab::harness::EmitResult res =
        gaplab::harness::emit(rep, out_dir);
    print_assertions(rep);
    std::printf("report: %s%s\n", res.json_path.c_str(),
                res.existed ? " (already present)" : "");
    const bool ok = rep.all_pass();
    std::printf("%s\n", ok ? "PASS" : "FAIL");
    return ok ? 0 : 1;
  } catch (const gaplab::ParseError& e) {
    std::fprintf(stderr, "config parse error: %s\n", e.what());
    return 2;
  } catch (const gaplab::ValidationError& e) {
    std::fprintf(stderr, "config rejected: %s\n", e.what());
    return 2;
  } catch (const gaplab::IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}

#pragma once

// Experiment orchestration.  `run` dispatches a parsed configuration to the
// solvers, checkers and trajectory engines, and returns a self-contained
// report: the resolved configuration, every computed quantity with its
// tolerance or standard error, wall times, and one named assertion per
// enabled pass/fail decision.  `emit` persists the report (and its CSV and
// plot attachments) under content-hash filenames.

#include <limits>
#include <map>
#include <string>
#include <vector>

#include "gaplab/config.hpp"
#include "gaplab/report.hpp"

namespace gaplab::harness {

struct Assertion {
  std::string name;
  bool enabled = true;
  bool pass = false;
  double value = std::numeric_limits<double>::quiet_NaN();
  double threshold = std::numeric_limits<double>::quiet_NaN();
  std::string detail;
};

struct VerificationReport {
  Json root;  // config echo, records, timings; everything but assertions
  std::vector<Assertion> assertions;
  std::map<std::string, std::string> attachments;  // name -> file body

  bool all_pass() const;
  Json to_json() const;  // root plus the serialized assertion list
};

// Executes the experiment.  Sweep cells run concurrently and, when out_dir
// is nonempty, each cell writes its own report there as it finishes; the
// sweep report doubles as the index and is emitted once by the caller.
VerificationReport run(const ExperimentConfig& cfg,
                       const std::string& out_dir = std::string());

EmitResult emit(const VerificationReport& rep, const std::string& out_dir);

}  // namespace gaplab::harness

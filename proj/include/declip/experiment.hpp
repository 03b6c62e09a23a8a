#pragma once

#include <string>
#include <vector>

#include "declip/analysis.hpp"
#include "declip/config.hpp"
#include "declip/engine.hpp"

namespace declip {

// Exit-code convention shared with the CLI: 0 all checks pass, 2 at least
// one check failed, 1 execution/config error, 64 usage error.
inline constexpr int kExitPass = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitCheckFailed = 2;
inline constexpr int kExitUsage = 64;

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ExperimentResult {
  int exit_code = kExitPass;
  std::string out_dir;
  std::vector<CheckResult> checks;
  std::vector<BoundVerdict> verdicts;
};

// Everything the `run` subcommand does: build the run(s) from a parsed
// config, execute the ensemble, run the requested checks, and write
// trajectory_<seed>.csv, verdicts.json, curvature.csv and summary.txt under
// <output_dir>/<name>/.
ExperimentResult run_experiment(const Config& cfg, const std::string& base_dir = ".",
                                bool force_normalize = false);

// Built from `run.*` config fields; exposed for tests.
struct BuiltRun {
  RunConfig run;
  bool stochastic = false;
  std::vector<ObjectivePtr> objectives;
};

BuiltRun build_run(const Config& cfg, const std::string& base_dir, bool force_normalize,
                   std::uint64_t seed);

}  // namespace declip

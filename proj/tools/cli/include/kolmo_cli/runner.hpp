#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "kolmo_cli/config.hpp"

namespace kolmo::cli {

inline constexpr const char* kToolVersion = "0.3.0";

enum ExitCode : int { kExitOk = 0, kExitCheckFailed = 1, kExitValidation = 2, kExitNumerical = 3 };

struct RunOptions {
  std::filesystem::path out = "out";
  bool strict = false;
  int workers = 1;
  std::optional<std::uint64_t> seed;
};

struct CheckResult {
  std::string name;
  bool pass = true;
  std::string detail;
};

struct StageTime {
  std::string name;
  double seconds = 0.0;
};

/// Outcome of one run; serialized to run_report.json next to the artifacts.
struct RunReport {
  std::string command;
  std::string config_digest;
  std::string version = kToolVersion;
  std::vector<StageTime> stages;
  std::vector<std::string> manifest;  // files written, relative to the output directory
  std::vector<CheckResult> checks;
  Json summary = Json::object();      // the command's headline numbers
  int exit_code = kExitOk;
  std::string error_kind;
  std::string error_message;

  bool checks_pass() const;
  Json to_json() const;
};

/// Applies flag overrides (seed) to the config tree, dispatches to the
/// command, writes artifacts under options.out and returns the report. Library
/// errors become exit code 3, failed checks exit code 1.
RunReport run(ExperimentConfig config, const RunOptions& options);

/// Runs `sweep.target` once per value of `sweep.axis`, each in its own
/// point_<i> subdirectory, with up to options.workers points in parallel, and
/// writes summary.json.
RunReport sweep(ExperimentConfig config, const RunOptions& options);

/// Entry point used by the executable; returns the process exit code.
int main_entry(int argc, char** argv);

}  // namespace kolmo::cli

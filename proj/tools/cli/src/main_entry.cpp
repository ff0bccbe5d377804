#include <cstdlib>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "kolmo_cli/runner.hpp"

namespace kolmo::cli {

namespace {

int default_workers() {
  if (const char* env = std::getenv("KOLMO_WORKERS")) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return n;
    } catch (const std::exception&) {
    }
    std::cerr << "kolmo: ignoring invalid KOLMO_WORKERS='" << env << "'\n";
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

void print_outcome(const RunReport& report, const RunOptions& options) {
  for (const auto& c : report.checks) {
    std::cout << (c.pass ? "[pass] " : "[FAIL] ") << c.name << ": " << c.detail << "\n";
  }
  if (!report.error_kind.empty()) {
    std::cerr << "kolmo: " << report.error_kind << ": " << report.error_message << "\n";
  }
  std::cout << "report: " << (options.out / "run_report.json").string() << " (exit " << report.exit_code << ")\n";
}

}  // namespace

int main_entry(int argc, char** argv) {
  CLI::App app{"Stationary Kolmogorov equation experiments", "kolmo"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  std::string config_path;
  std::string out = "out";
  bool strict = false;
  int workers = 0;
  std::uint64_t seed = 0;
  std::string chosen;
  for (const auto& name : subcommands()) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
    sub->add_option("--config", config_path, "experiment config (JSON)")->required();
    sub->add_option("--out", out, "output directory");
    sub->add_flag("--strict", strict, "treat warnings and failed points as errors");
    sub->add_option("--workers", workers, "parallel sweep points (overrides KOLMO_WORKERS)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "override run.seed");
    sub->callback([&chosen, name] { chosen = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  RunOptions options;
  options.out = out;
  options.strict = strict;
  options.workers = workers > 0 ? workers : default_workers();
  CLI::App* sub = app.get_subcommand(chosen);
  if (sub->count("--seed") > 0) options.seed = seed;

  try {
    ExperimentConfig config = ExperimentConfig::load(config_path, chosen);
    const RunReport report = chosen == "sweep" ? sweep(std::move(config), options) : run(std::move(config), options);
    print_outcome(report, options);
    return report.exit_code;
  } catch (const ValidationError& e) {
    std::cerr << "kolmo: invalid config '" << config_path << "': " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "kolmo: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace kolmo::cli

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "kolmo_cli/config.hpp"
#include "kolmo_cli/runner.hpp"

namespace kolmo::cli {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / ("kolmo_cli_" + std::string(info->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write_config(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  int invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "kolmo");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    testing::internal::CaptureStdout();
    testing::internal::CaptureStderr();
    const int code = main_entry(static_cast<int>(argv.size()), argv.data());
    stdout_ = testing::internal::GetCapturedStdout();
    stderr_ = testing::internal::GetCapturedStderr();
    return code;
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  static Json read_json(const fs::path& p) { return Json::parse(slurp(p)); }

  fs::path dir_;
  std::string stdout_, stderr_;
};

const char* kSolveConfig = R"J({"command": "solve", "model": {"diffusion": "1", "drift": "-x"},
  "grid": {"dimension": 1, "radius": 8, "cells": 256}, "run": {"seed": 3}})J";

TEST_F(CliTest, MinimalSolveSucceeds) {
  const auto cfg = write_config("solve.json", kSolveConfig);
  const auto out = dir_ / "out";
  ASSERT_EQ(invoke({"solve", "--config", cfg.string(), "--out", out.string()}), 0) << stderr_;
  EXPECT_TRUE(fs::exists(out / "density.csv"));
  EXPECT_TRUE(fs::exists(out / "solve.json"));
  const Json report = read_json(out / "run_report.json");
  EXPECT_EQ(report["command"], "solve");
  EXPECT_EQ(report["tool_version"], kToolVersion);
  EXPECT_EQ(report["config_digest"].get<std::string>().size(), 64u);
  for (const auto& f : report["manifest"]) EXPECT_TRUE(fs::exists(out / f.get<std::string>())) << f;
  for (const auto& c : report["checks"]) EXPECT_TRUE(c["pass"].get<bool>()) << c;
  EXPECT_FALSE(report["stages"].empty());
  EXPECT_EQ(slurp(out / "density.csv").substr(0, 6), "x,rho\n");
  EXPECT_NEAR(read_json(out / "solve.json")["mass"].get<double>(), 1.0, 1e-12);
}

TEST_F(CliTest, UnknownKeyIsAValidationError) {
  const auto cfg = write_config("bad.json", R"J({"command": "solve",
    "model": {"diffusion": "1", "drift": "-x", "drift_params": {"betaa2": 1}},
    "grid": {"dimension": 1, "radius": 8, "cells": 256}})J");
  EXPECT_EQ(invoke({"solve", "--config", cfg.string(), "--out", (dir_ / "out").string()}), 2);
  EXPECT_NE(stderr_.find("betaa2"), std::string::npos) << stderr_;
  EXPECT_FALSE(fs::exists(dir_ / "out" / "density.csv"));
}

TEST_F(CliTest, RangeAndSyntaxErrorsAreValidationErrors) {
  const std::vector<std::string> bad{
      R"J({"command": "solve", "model": {"diffusion": "1", "drift": "-x"}, "grid": {"dimension": 1, "radius": 8, "cells": 100}})J",
      R"J({"command": "solve", "model": {"diffusion": "1", "drift": "-x"}, "grid": {"dimension": 3, "radius": 8, "cells": 64}})J",
      R"J({"command": "solve", "model": {"diffusion": "1", "drift": "-x"}, "grid": {"dimension": 1, "radius": 2, "cells": 64}})J",
      R"J({"command": "solve", "model": {"diffusion": "1 +", "drift": "-x"}, "grid": {"dimension": 1, "radius": 8, "cells": 64}})J",
      R"J({"command": "solve", "model": {"diffusion": "1", "drift": "-x"})J",
      R"J({"command": "poisson", "model": {"diffusion": "1", "drift": "-x"}, "grid": {"dimension": 1, "radius": 8, "cells": 64}})J",
  };
  for (std::size_t i = 0; i < bad.size(); ++i) {
    const auto cfg = write_config("bad" + std::to_string(i) + ".json", bad[i]);
    EXPECT_EQ(invoke({"solve", "--config", cfg.string(), "--out", (dir_ / "out").string()}), 2) << bad[i];
  }
}

TEST_F(CliTest, UsageErrorsExitTwo) {
  EXPECT_EQ(invoke({"solve"}), 2);
  EXPECT_EQ(invoke({"frobnicate", "--config", "x.json"}), 2);
  EXPECT_EQ(invoke({"solve", "--config", (dir_ / "missing.json").string()}), 2);
  EXPECT_EQ(invoke({"solve", "--config", "x.json", "--workers", "0"}), 2);
}

TEST_F(CliTest, NumericalFailureExitsThree) {
  const auto cfg = write_config("weak.json", R"J({"command": "solve",
    "model": {"diffusion": "1", "drift": "-0.02 * x", "drift_params": {"beta2": 0.02}},
    "grid": {"dimension": 1, "radius": 8, "cells": 64}})J");
  const auto out = dir_ / "out";
  EXPECT_EQ(invoke({"solve", "--config", cfg.string(), "--out", out.string()}), 1);
  EXPECT_EQ(invoke({"solve", "--config", cfg.string(), "--out", out.string(), "--strict"}), 3);
  EXPECT_EQ(read_json(out / "run_report.json")["error"]["kind"], "truncation");
}

TEST_F(CliTest, RerunIsByteIdentical) {
  const auto cfg = write_config("solve.json", kSolveConfig);
  for (const char* name : {"a", "b"}) ASSERT_EQ(invoke({"solve", "--config", cfg.string(), "--out", (dir_ / name).string()}), 0);
  for (const char* f : {"density.csv", "solve.json"}) EXPECT_EQ(slurp(dir_ / "a" / f), slurp(dir_ / "b" / f)) << f;
  EXPECT_EQ(read_json(dir_ / "a" / "run_report.json")["config_digest"],
            read_json(dir_ / "b" / "run_report.json")["config_digest"]);
}

TEST_F(CliTest, DigestIgnoresKeyOrderButSeesValues) {
  const Json a = Json::parse(R"J({"a": 1, "b": {"c": 2, "d": 3}})J");
  const Json b = Json::parse(R"J({"b": {"d": 3, "c": 2}, "a": 1})J");
  const Json c = Json::parse(R"J({"a": 1, "b": {"c": 2, "d": 4}})J");
  EXPECT_EQ(digest(a), digest(b));
  EXPECT_NE(digest(a), digest(c));
}

TEST_F(CliTest, SeedFlagOverridesConfig) {
  const auto cfg = write_config("dini.json", R"J({"command": "dini",
    "model": {"example": {"name": "weierstrass-holder"}}, "grid": {"dimension": 1, "radius": 4, "cells": 64},
    "run": {"seed": 1, "sampling": {"centers": 16, "points_per_ball": 16}}})J");
  ASSERT_EQ(invoke({"dini", "--config", cfg.string(), "--out", (dir_ / "a").string(), "--seed", "99"}), 0) << stderr_;
  EXPECT_EQ(read_json(dir_ / "a" / "dini.json")["seed"], 99);
  EXPECT_EQ(slurp(dir_ / "a" / "omega.csv").substr(0, 15), "r,omega,stderr\n");
}

TEST_F(CliTest, EveryCommandWritesItsArtifacts) {
  struct Case {
    std::string command, config, csv, header;
  };
  const std::vector<Case> cases{
      {"poisson", R"J({"command": "poisson", "model": {"diffusion": "1", "drift": "-x", "psi": "tanh(x)"},
         "grid": {"dimension": 1, "radius": 8, "cells": 512}})J", "poisson.csv", "x,u,du,residual\n"},
      {"stability", R"J({"command": "stability", "model": {"family": "ou-diffusion"},
         "grid": {"dimension": 1, "radius": 8, "cells": 256}})J", "stability.csv", "delta,lhs,rhs_diffusion,rhs_drift,c_hat\n"},
      {"meanfield", R"J({"command": "meanfield", "model": {"diffusion": "1", "drift": "-x",
         "kernel": {"h": ["tanh(y)"], "q_bound": 0, "h_bound": 1}},
         "grid": {"dimension": 1, "radius": 8, "cells": 256}, "run": {"epsilon": 0.05, "threshold": false}})J",
       "meanfield.csv", "iteration,gap,contraction_factor\n"},
  };
  for (const auto& c : cases) {
    const auto cfg = write_config(c.command + ".json", c.config);
    const auto out = dir_ / c.command;
    ASSERT_EQ(invoke({c.command, "--config", cfg.string(), "--out", out.string()}), 0) << c.command << stderr_;
    const std::string csv = slurp(out / c.csv);
    EXPECT_EQ(csv.substr(0, c.header.size()), c.header) << c.command;
    EXPECT_TRUE(fs::exists(out / (c.command + ".json")));
  }
  const Json mf = read_json(dir_ / "meanfield" / "meanfield.json");
  EXPECT_TRUE(mf["converged"].get<bool>());
  EXPECT_TRUE(mf.contains("M_hat"));
  EXPECT_LE(mf["fixed_point_diameter"].get<double>(), 1e-6);
}

TEST_F(CliTest, StabilityFromDeltaExpressions) {
  const auto cfg = write_config("stab.json", R"J({"command": "stability",
    "model": {"diffusion": "1", "drift": "-(1 + delta) * x", "drift_params": {"beta3": 2}},
    "grid": {"dimension": 1, "radius": 8, "cells": 512}, "run": {"deltas": [0.001, 0.01, 0.1]}})J");
  ASSERT_EQ(invoke({"stability", "--config", cfg.string(), "--out", (dir_ / "out").string()}), 0) << stderr_;
  EXPECT_NEAR(read_json(dir_ / "out" / "stability.json")["slope"].get<double>(), 1.0, 0.1);
}

const char* kDeltaSweep = R"J({"command": "sweep", "model": {"family": "ou-drift"},
  "grid": {"dimension": 1, "radius": 8, "cells": 512},
  "sweep": {"target": "stability", "axis": "delta", "values": [0.001, 0.003, 0.01, 0.03, 0.1]}})J";

TEST_F(CliTest, DeltaSweepPopulatesSlope) {
  const auto cfg = write_config("sweep.json", kDeltaSweep);
  ASSERT_EQ(invoke({"sweep", "--config", cfg.string(), "--out", (dir_ / "out").string(), "--workers", "3"}), 0) << stderr_;
  const Json summary = read_json(dir_ / "out" / "summary.json");
  EXPECT_NEAR(summary["slope"].get<double>(), 1.0, 0.1);
  EXPECT_TRUE(summary["failures"].empty());
  for (int i = 0; i < 5; ++i) EXPECT_TRUE(fs::exists(dir_ / "out" / ("point_" + std::to_string(i)) / "stability.csv"));
  const Json report = read_json(dir_ / "out" / "run_report.json");
  for (const auto& f : report["manifest"]) EXPECT_TRUE(fs::exists(dir_ / "out" / f.get<std::string>())) << f;
}

TEST_F(CliTest, SweepIsDeterministicAcrossWorkerCounts) {
  const auto cfg = write_config("sweep.json", kDeltaSweep);
  ASSERT_EQ(invoke({"sweep", "--config", cfg.string(), "--out", (dir_ / "w1").string(), "--workers", "1"}), 0);
  ASSERT_EQ(invoke({"sweep", "--config", cfg.string(), "--out", (dir_ / "w4").string(), "--workers", "4"}), 0);
  EXPECT_EQ(slurp(dir_ / "w1" / "summary.json"), slurp(dir_ / "w4" / "summary.json"));
  for (int i = 0; i < 5; ++i) {
    const std::string p = "point_" + std::to_string(i) + "/stability.csv";
    EXPECT_EQ(slurp(dir_ / "w1" / p), slurp(dir_ / "w4" / p));
  }
}

TEST_F(CliTest, SweepPointsAreIsolated) {
  // Dropping a point leaves the remaining points' files unchanged.
  const auto full = write_config("full.json", R"J({"command": "sweep", "model": {"family": "ou-drift"},
    "grid": {"dimension": 1, "radius": 8, "cells": 256},
    "sweep": {"target": "stability", "axis": "delta", "values": [0.01, 0.03, 0.1]}})J");
  const auto part = write_config("part.json", R"J({"command": "sweep", "model": {"family": "ou-drift"},
    "grid": {"dimension": 1, "radius": 8, "cells": 256},
    "sweep": {"target": "stability", "axis": "delta", "values": [0.01, 0.1, 0.2]}})J");
  ASSERT_EQ(invoke({"sweep", "--config", full.string(), "--out", (dir_ / "full").string()}), 0);
  ASSERT_EQ(invoke({"sweep", "--config", part.string(), "--out", (dir_ / "part").string()}), 0);
  EXPECT_EQ(slurp(dir_ / "full/point_0/stability.csv"), slurp(dir_ / "part/point_0/stability.csv"));
  EXPECT_EQ(slurp(dir_ / "full/point_2/stability.csv"), slurp(dir_ / "part/point_1/stability.csv"));
}

TEST_F(CliTest, SweepNeedsThreePoints) {
  const auto cfg = write_config("one.json", R"J({"command": "sweep", "model": {"family": "ou-drift"},
    "grid": {"dimension": 1, "radius": 8, "cells": 256},
    "sweep": {"target": "stability", "axis": "delta", "values": [0.01]}})J");
  EXPECT_EQ(invoke({"sweep", "--config", cfg.string(), "--out", (dir_ / "out").string()}), 2);
  EXPECT_NE(stderr_.find("sweep.values"), std::string::npos);
}

TEST_F(CliTest, MixedSweepLenientAndStrict) {
  // c = 0.05 under-confines the box, so that point fails its boundary-mass check.
  const auto cfg = write_config("mixed.json", R"J({"command": "sweep",
    "model": {"diffusion": "1", "drift": "-c * x", "params": {"c": 1}},
    "grid": {"dimension": 1, "radius": 4, "cells": 64},
    "sweep": {"target": "solve", "axis": "c", "values": [1.0, 0.05, 2.0]}})J");
  ASSERT_EQ(invoke({"sweep", "--config", cfg.string(), "--out", (dir_ / "lenient").string()}), 0);
  const Json summary = read_json(dir_ / "lenient" / "summary.json");
  ASSERT_EQ(summary["failures"].size(), 1u);
  EXPECT_EQ(summary["failures"][0]["index"], 1);
  EXPECT_NE(invoke({"sweep", "--config", cfg.string(), "--out", (dir_ / "strict").string(), "--strict"}), 0);
}

TEST_F(CliTest, EpsilonSweepFitsContractionFactor) {
  const auto cfg = write_config("eps.json", R"J({"command": "sweep", "model": {"diffusion": "1", "drift": "-x",
    "kernel": {"h": ["tanh(y)"], "q_bound": 0, "h_bound": 1}},
    "grid": {"dimension": 1, "radius": 8, "cells": 256}, "run": {"threshold": false},
    "sweep": {"target": "meanfield", "axis": "epsilon", "values": [0.01, 0.05, 0.1, 0.2]}})J");
  ASSERT_EQ(invoke({"sweep", "--config", cfg.string(), "--out", (dir_ / "out").string()}), 0) << stderr_;
  EXPECT_GT(read_json(dir_ / "out" / "summary.json")["factor_r_squared"].get<double>(), 0.9);
}

TEST_F(CliTest, WorkerEnvironmentVariableIsAccepted) {
  const auto cfg = write_config("sweep.json", kDeltaSweep);
  ::setenv("KOLMO_WORKERS", "2", 1);
  EXPECT_EQ(invoke({"sweep", "--config", cfg.string(), "--out", (dir_ / "env").string()}), 0);
  ::setenv("KOLMO_WORKERS", "zero", 1);
  EXPECT_EQ(invoke({"sweep", "--config", cfg.string(), "--out", (dir_ / "bad").string()}), 0);
  EXPECT_NE(stderr_.find("KOLMO_WORKERS"), std::string::npos);
  ::unsetenv("KOLMO_WORKERS");
}

}  // namespace
}  // namespace kolmo::cli

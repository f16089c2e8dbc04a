// Copyright 2026 The cfd Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cfd/error.hpp"
#include "cfd/presets.hpp"
#include "cfd_cli/commands.hpp"
#include "cfd_cli/experiment_config.hpp"
#include "cfd_cli/gradcheck_suite.hpp"
#include "test_support.hpp"

namespace cfd::cli {
namespace {

using cfd::testing::TempDir;

std::string config_error(const std::string& text) {
  try {
    parse_experiment_config(text, "exp.json");
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::kConfig);
    return e.what();
  }
  ADD_FAILURE() << "config accepted";
  return {};
}

// Runs the installed binary and returns its exit status.
int run_cli(const std::string& args) {
  const std::string cmd = std::string(CFD_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

const char* kSmallConfig = R"({
  "synth": {"n_source": 120, "n_target": 90, "dim": 4, "n_layers": 2,
            "layer_noise_profile": [0.5, 0.25]},
  "train": {"method": "p_cfd", "fam": {"n_layers_used": 2, "out_dim": 4},
            "max_epochs": 2, "lr": 0.01, "batch_cls": 30, "batch_mi": 30,
            "schedule": {"k0": 20, "k_step": 10}, "n_negatives": 3}
})";

TEST(ExperimentConfig, UnknownKeyNamesTheKeyAndLine) {
  const std::string msg = config_error("{\n  \"train\": {\n    \"lamda\": 2\n  }\n}");
  EXPECT_NE(msg.find("exp.json:3:"), std::string::npos) << msg;
  EXPECT_NE(msg.find("train.lamda"), std::string::npos) << msg;
}

TEST(ExperimentConfig, WrongTypesAndSyntaxErrorsAreConfigErrors) {
  EXPECT_NE(config_error(R"({"train": {"lr": "fast"}})").find("train.lr"), std::string::npos);
  EXPECT_NE(config_error("{\"train\": ").find("exp.json:"), std::string::npos);
  config_error(R"({"train": {"method": "p+X"}})");
  config_error(R"({"synth": {}, "manifest": "m.json"})");
}

TEST(ExperimentConfig, DefaultsAndRoundTripThroughJson) {
  const ExperimentConfig c = parse_experiment_config("{}", "empty");
  EXPECT_FALSE(c.synth.has_value());
  EXPECT_EQ(c.train.method, Method::kPCfd);
  EXPECT_EQ(c.train.fam.tau, 0.3);
  EXPECT_EQ(c.train.n_negatives, 10u);
  EXPECT_EQ(c.train.lambda, 1.0);
  EXPECT_EQ(c.run_seeds(), (std::vector<std::uint64_t>{1}));
  const ExperimentConfig full = parse_experiment_config(kSmallConfig, "small");
  const ExperimentConfig again = parse_experiment_config(to_json(full).dump(), "again");
  EXPECT_EQ(to_json(again), to_json(full));
}

TEST(ExperimentConfig, WhichListParsing) {
  EXPECT_EQ(parse_which("all"), (std::vector<std::string>{"accuracy", "adist", "jointerr", "indomain"}));
  EXPECT_EQ(parse_which("adist,accuracy"), (std::vector<std::string>{"adist", "accuracy"}));
  EXPECT_THROW(parse_which("accuracy,bogus"), Error);
}

TEST(ExperimentConfig, OverridesTakePrecedence) {
  ExperimentConfig c = parse_experiment_config(kSmallConfig, "small");
  Overrides o;
  o.seed = 7;
  o.n_seeds = 3;
  o.method = "p+C";
  o.out = "elsewhere";
  apply_overrides(c, o);
  EXPECT_EQ(c.train.seed, 7u);
  EXPECT_EQ(c.synth->seed, 7u);
  EXPECT_EQ(c.run_seeds(), (std::vector<std::uint64_t>{7, 8, 9}));
  EXPECT_EQ(c.train.method, Method::kPC);
  EXPECT_EQ(c.out, "elsewhere");
  EXPECT_EQ(run_dir(c, 8), std::filesystem::path("elsewhere") / "seed_8");
}

TEST(ExperimentConfig, BenchmarkFileMatchesThePreset) {
  const ExperimentConfig c =
      load_experiment_config(std::filesystem::path(CFD_SOURCE_DIR) / "configs" / "benchmark.json");
  ExperimentConfig expected = c;
  expected.synth = benchmark_synth_config(1);
  expected.train = benchmark_train_config(Method::kPCfd, 1);
  EXPECT_EQ(to_json(c), to_json(expected));
  EXPECT_EQ(c.run_seeds(), (std::vector<std::uint64_t>{1, 2, 3, 4, 5}));
}

TEST(Gradcheck, EveryLossListedOnceAndPasses) {
  SuiteOptions o;
  o.batches = 4;
  const SuiteReport r = run_gradcheck_suite(o);
  EXPECT_TRUE(r.passed);
  std::set<std::string> names;
  for (const auto& l : r.losses) EXPECT_TRUE(names.insert(l.name).second) << l.name;
  const auto expected = registered_losses();
  EXPECT_EQ(names, std::set<std::string>(expected.begin(), expected.end()));
  EXPECT_EQ(r.losses.size(), 9u);
}

TEST(Gradcheck, InjectedFaultIsReported) {
  SuiteOptions o;
  o.batches = 2;
  o.inject_fault = "nce_fd";
  const SuiteReport r = run_gradcheck_suite(o);
  EXPECT_FALSE(r.passed);
  for (const auto& l : r.losses) EXPECT_EQ(l.passed, l.name != "nce_fd") << l.name;
  o.inject_fault = "nope";
  EXPECT_THROW(run_gradcheck_suite(o), Error);
}

TEST(Cli, ExitCodes) {
  TempDir dir;
  EXPECT_EQ(run_cli("gradcheck --batches 2"), kExitOk);
  EXPECT_EQ(run_cli("gradcheck --batches 2 --inject-fault kl"), kExitNumeric);
  EXPECT_EQ(run_cli("frobnicate"), kExitConfig);
  write_text(dir / "train_only.json", R"({"train": {"lr": 0.01}})");
  EXPECT_EQ(run_cli("--config " + (dir / "train_only.json").string() + " synth"), kExitConfig);
  write_text(dir / "typo.json", R"({"trian": {}})");
  EXPECT_EQ(run_cli("--config " + (dir / "typo.json").string() + " train"), kExitConfig);

  write_text(dir / "small.json", kSmallConfig);
  const std::string base = "--config " + (dir / "small.json").string() + " --out " + (dir / "d").string();
  ASSERT_EQ(run_cli(base + " synth"), kExitOk);
  auto bytes = cfd::testing::read_bytes(dir / "d" / "source_train.fset");
  bytes.resize(bytes.size() - 5);
  cfd::testing::write_bytes(dir / "d" / "source_train.fset", bytes);
  write_text(dir / "from_manifest.json",
             R"({"manifest": ")" + (dir / "d" / "manifest.json").generic_string() + R"("})");
  EXPECT_EQ(run_cli("--config " + (dir / "from_manifest.json").string() + " --out " +
                    (dir / "m").string() + " train"),
            kExitData);
}

TEST(Cli, SynthIsByteIdenticalAcrossRuns) {
  TempDir dir;
  write_text(dir / "small.json", kSmallConfig);
  const std::string cfg = "--config " + (dir / "small.json").string();
  ASSERT_EQ(run_cli(cfg + " --out " + (dir / "a").string() + " synth"), kExitOk);
  ASSERT_EQ(run_cli(cfg + " --out " + (dir / "b").string() + " synth"), kExitOk);
  for (const char* name : {"source_train.fset", "source_valid.fset", "target_unlabeled.fset",
                           "target_test.fset", "manifest.json"}) {
    ASSERT_TRUE(std::filesystem::exists(dir / "a" / name)) << name;
    EXPECT_EQ(cfd::testing::read_bytes(dir / "a" / name), cfd::testing::read_bytes(dir / "b" / name))
        << name;
  }
}

TEST(Cli, SeedsProduceTracesAndSummary) {
  TempDir dir;
  write_text(dir / "small.json", kSmallConfig);
  ASSERT_EQ(run_cli("--config " + (dir / "small.json").string() + " --seeds 5 --out " +
                    (dir / "o").string() + " train"),
            kExitOk);
  for (int s = 1; s <= 5; ++s) {
    const auto run = dir / "o" / ("seed_" + std::to_string(s));
    EXPECT_TRUE(std::filesystem::exists(run / "trace.csv"));
    EXPECT_TRUE(std::filesystem::exists(run / "checkpoint.fckp"));
  }
  std::ifstream in(dir / "o" / "summary.json");
  const auto summary = nlohmann::json::parse(in);
  const auto& acc = summary.at("target_accuracy");
  ASSERT_EQ(acc.at("values").size(), 5u);
  std::vector<double> values = acc.at("values").get<std::vector<double>>();
  const SeedStats expect = summarize(values);
  EXPECT_EQ(acc.at("mean").get<double>(), expect.mean);
  EXPECT_EQ(acc.at("std").get<double>(), expect.stddev);
}

TEST(Cli, DiagnoseCheckpoint) {
  TempDir dir;
  write_text(dir / "small.json", kSmallConfig);
  const std::string cfg = "--config " + (dir / "small.json").string();
  ASSERT_EQ(run_cli(cfg + " --out " + (dir / "t").string() + " train"), kExitOk);
  ASSERT_EQ(run_cli(cfg + " --out " + (dir / "r").string() + " diagnose --checkpoint " +
                    (dir / "t" / "checkpoint.fckp").string() + " --which accuracy,adist --key run"),
            kExitOk);
  std::ifstream in(dir / "r" / "report.json");
  const auto report = nlohmann::json::parse(in);
  EXPECT_TRUE(report.at("run").contains("accuracy"));
  EXPECT_TRUE(report.at("run").contains("a_distance"));
  EXPECT_FALSE(report.at("run").contains("joint_error"));
}

}  // namespace
}  // namespace cfd::cli

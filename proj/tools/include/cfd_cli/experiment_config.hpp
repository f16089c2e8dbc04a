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

#ifndef CFD_CLI_EXPERIMENT_CONFIG_HPP_
#define CFD_CLI_EXPERIMENT_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "cfd/datagen.hpp"
#include "cfd/evaluation.hpp"
#include "cfd/trainer.hpp"

namespace cfd::cli {

inline constexpr const char* kDiagnosticNames[] = {"accuracy", "adist", "jointerr", "indomain"};

struct DiagnosticsConfig {
  std::vector<std::string> which = {"accuracy"};
  ProbeConfig probe;
  // Shape of the model distilled by the in-domain test comes from the
  // checkpoint or the train section; only the optimisation budget lives here.
  int in_domain_epochs = 20;
  double in_domain_lr = 1e-3;
  std::size_t in_domain_batch_size = 50;
  std::size_t in_domain_negatives = 10;
  std::uint64_t in_domain_seed = 11;
};

// One experiment. Data come either from a manifest or from an inline synth
// section; with a synth section every run regenerates the data with the run's
// seed, so that seeds are independent replicates of the benchmark.
struct ExperimentConfig {
  std::optional<SynthConfig> synth;
  std::optional<std::filesystem::path> manifest;
  TrainConfig train;
  DiagnosticsConfig diagnostics;
  std::filesystem::path out = "out";
  std::vector<std::uint64_t> seeds;  // empty: the single train.seed

  std::vector<std::uint64_t> run_seeds() const;
  bool multi_seed() const { return seeds.size() > 1; }
};

// Parses the JSON experiment file. Unknown keys, type mismatches and syntax
// errors raise a config error whose message starts with "<origin>:<line>:".
ExperimentConfig parse_experiment_config(std::string_view text, const std::string& origin);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

// Every field with its effective value.
nlohmann::ordered_json to_json(const ExperimentConfig& config);

// Splits "a,b,c" and validates diagnostic names; "all" expands to every one.
std::vector<std::string> parse_which(std::string_view list);

}  // namespace cfd::cli

#endif  // CFD_CLI_EXPERIMENT_CONFIG_HPP_

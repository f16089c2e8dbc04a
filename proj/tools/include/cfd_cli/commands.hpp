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

#ifndef CFD_CLI_COMMANDS_HPP_
#define CFD_CLI_COMMANDS_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cfd/error.hpp"
#include "cfd/evaluation.hpp"
#include "cfd/feature_store.hpp"
#include "cfd/trainer.hpp"
#include "cfd_cli/experiment_config.hpp"
#include "cfd_cli/gradcheck_suite.hpp"

namespace cfd::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNumeric = 4;

int exit_code_for(ErrorCategory category);

// Command-line values that take precedence over the config file.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n_seeds;  // seeds seed, seed+1, ...
  std::optional<std::filesystem::path> out;
  std::optional<std::string> method;
};

void apply_overrides(ExperimentConfig& config, const Overrides& overrides);

// Data for one run: the manifest's files, or the synth section regenerated
// with `seed`.
ExperimentData experiment_data(const ExperimentConfig& config, std::uint64_t seed);

// Directory that receives one run's outputs.
std::filesystem::path run_dir(const ExperimentConfig& config, std::uint64_t seed);

DiagnosticReport run_diagnostics(const FamParams& params, const ExperimentData& data,
                                 const std::vector<std::string>& which,
                                 const DiagnosticsConfig& config);

// Writes source_train / source_valid / target_unlabeled / target_test FEATSET
// files and manifest.json per seed.
int cmd_synth(const ExperimentConfig& config, std::ostream& log);

// Writes trace.csv, checkpoint.fckp and config.json per seed plus summary.json.
int cmd_train(const ExperimentConfig& config, std::ostream& log);

struct DiagnoseOptions {
  std::optional<std::filesystem::path> checkpoint;
  std::vector<std::string> which;  // empty: the config's list
  std::vector<Method> sweep;       // non-empty: train and diagnose each method per seed
  std::string key;                 // report key for a single checkpoint
};

// Single checkpoint: report.json keyed by `key`. Sweep: sweep.csv with one row
// per (method, seed) and report.json with per-seed values, means and stds.
int cmd_diagnose(const ExperimentConfig& config, const DiagnoseOptions& options,
                 std::ostream& log);

// Exit code 0 when every loss passes, 4 otherwise.
int cmd_gradcheck(const SuiteOptions& options, const std::optional<std::filesystem::path>& out,
                  std::ostream& log);

}  // namespace cfd::cli

#endif  // CFD_CLI_COMMANDS_HPP_

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

#include <CLI11.hpp>

#include <iostream>

#include "cfd_cli/commands.hpp"

namespace {

std::vector<std::string> split(const std::string& list) {
  std::vector<std::string> out;
  std::string item;
  for (char c : list + ",") {
    if (c == ',') {
      if (!item.empty()) out.push_back(item);
      item.clear();
    } else {
      item += c;
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace cfd::cli;

  CLI::App app{"Class-aware feature self-distillation toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::uint64_t seed = 0;
  std::size_t n_seeds = 0;
  std::string out;
  std::string method;
  auto* seed_opt = app.add_option("--seed", seed, "Seed (overrides the config)");
  auto* seeds_opt = app.add_option("--seeds", n_seeds, "Run this many consecutive seeds");
  auto* out_opt = app.add_option("--out", out, "Output directory");
  auto* method_opt = app.add_option("--method", method, "Method preset, e.g. p_cfd or \"p+CFd\"");
  app.add_option("--config", config_path, "Experiment config (JSON)");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic benchmark");
  auto* train = app.add_subcommand("train", "Train one method");

  auto* diagnose = app.add_subcommand("diagnose", "Diagnostics of a checkpoint or a method sweep");
  std::string checkpoint;
  std::string which;
  std::string sweep;
  std::string key;
  diagnose->add_option("--checkpoint", checkpoint, "FCKP checkpoint to evaluate");
  diagnose->add_option("--which", which, "accuracy,adist,jointerr,indomain or all");
  diagnose->add_option("--sweep", sweep, "Comma-separated methods to train and diagnose");
  diagnose->add_option("--key", key, "Report key for a single checkpoint");

  auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference check of every loss");
  SuiteOptions suite;
  gradcheck->add_option("--batches", suite.batches, "Random toy batches per loss");
  gradcheck->add_option("--tolerance", suite.tolerance, "Maximum relative error");
  gradcheck->add_option("--inject-fault", suite.inject_fault,
                        "Flip the sign of this loss's backward pass");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*gradcheck) {
      if (*seed_opt) suite.seed = seed;
      std::optional<std::filesystem::path> dir;
      if (*out_opt) dir = out;
      return cmd_gradcheck(suite, dir, std::cout);
    }

    ExperimentConfig config =
        config_path.empty() ? ExperimentConfig{} : load_experiment_config(config_path);
    Overrides overrides;
    if (*seed_opt) overrides.seed = seed;
    if (*seeds_opt) overrides.n_seeds = n_seeds;
    if (*out_opt) overrides.out = out;
    if (*method_opt) overrides.method = method;
    apply_overrides(config, overrides);

    if (*synth) return cmd_synth(config, std::cout);
    if (*train) return cmd_train(config, std::cout);

    DiagnoseOptions options;
    if (!checkpoint.empty()) options.checkpoint = checkpoint;
    if (!which.empty()) options.which = parse_which(which);
    for (const auto& m : split(sweep)) options.sweep.push_back(cfd::parse_method(m));
    options.key = key;
    return cmd_diagnose(config, options, std::cout);
  } catch (const cfd::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.category());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
}

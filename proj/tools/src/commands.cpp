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

#include "cfd_cli/commands.hpp"

#include <cstdio>
#include <fstream>
#include <map>

#include "cfd/checkpoint.hpp"
#include "cfd/datagen.hpp"

namespace cfd::cli {

namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  require(static_cast<bool>(out), ErrorCode::kIo, "write failed for " + path.string());
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string short_fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

ojson stats_json(const SeedStats& s) {
  return {{"values", s.values}, {"mean", s.mean}, {"std", s.stddev}};
}

// Flattens a report into (column, value) pairs in a fixed order.
std::vector<std::pair<std::string, std::optional<double>>> report_columns(
    const DiagnosticReport& r) {
  auto opt = [](bool has, double v) { return has ? std::optional<double>(v) : std::nullopt; };
  return {
      {"accuracy", r.accuracy},
      {"a_distance", opt(r.adist.has_value(), r.adist ? r.adist->a_distance : 0.0)},
      {"domain_error", opt(r.adist.has_value(), r.adist ? r.adist->domain_error : 0.0)},
      {"joint_error", opt(r.joint.has_value(), r.joint ? r.joint->joint_error : 0.0)},
      {"joint_source_error", opt(r.joint.has_value(), r.joint ? r.joint->source_error : 0.0)},
      {"joint_target_error", opt(r.joint.has_value(), r.joint ? r.joint->target_error : 0.0)},
      {"in_domain_fd_accuracy",
       opt(r.in_domain.has_value(), r.in_domain ? r.in_domain->fd_accuracy : 0.0)},
      {"in_domain_supervised_accuracy",
       opt(r.in_domain.has_value(), r.in_domain ? r.in_domain->supervised_accuracy : 0.0)},
  };
}

bool wants(const std::vector<std::string>& which, const char* name) {
  return std::find(which.begin(), which.end(), name) != which.end();
}

const Dataset& require_target_test(const ExperimentData& data, const char* what) {
  require(data.target_test.has_value(), ErrorCode::kMissingRole,
          std::string(what) + " needs a labelled target_test set");
  return *data.target_test;
}

}  // namespace

int exit_code_for(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kConfig: return kExitConfig;
    case ErrorCategory::kData: return kExitData;
    case ErrorCategory::kNumeric: return kExitNumeric;
  }
  return kExitData;
}

void apply_overrides(ExperimentConfig& config, const Overrides& o) {
  if (o.seed) {
    config.train.seed = *o.seed;
    if (config.synth) config.synth->seed = *o.seed;
    config.seeds.clear();
  }
  if (o.n_seeds) {
    require(*o.n_seeds >= 1, ErrorCode::kConfig, "--seeds must be >= 1");
    const std::uint64_t base = o.seed ? *o.seed
                               : !config.seeds.empty() ? config.seeds.front()
                                                       : config.train.seed;
    config.seeds.clear();
    for (std::size_t i = 0; i < *o.n_seeds; ++i) config.seeds.push_back(base + i);
  }
  if (o.out) config.out = *o.out;
  if (o.method) config.train.method = parse_method(*o.method);
}

ExperimentData experiment_data(const ExperimentConfig& config, std::uint64_t seed) {
  if (config.synth) {
    SynthConfig s = *config.synth;
    s.seed = seed;
    SynthData d = generate(s);
    return {std::move(d.source_train), std::move(d.source_valid), std::move(d.target_unlabeled),
            std::move(d.target_test)};
  }
  require(config.manifest.has_value(), ErrorCode::kConfig,
          "config needs either a 'synth' section or a 'manifest' path");
  return load_experiment(Manifest::read(*config.manifest));
}

fs::path run_dir(const ExperimentConfig& config, std::uint64_t seed) {
  return config.multi_seed() ? config.out / ("seed_" + std::to_string(seed)) : config.out;
}

DiagnosticReport run_diagnostics(const FamParams& params, const ExperimentData& data,
                                 const std::vector<std::string>& which,
                                 const DiagnosticsConfig& config) {
  DiagnosticReport report;
  if (wants(which, "accuracy")) {
    report.accuracy = accuracy(params, require_target_test(data, "accuracy"));
  }
  if (wants(which, "adist")) {
    report.adist = a_distance(params, data.source_train, data.target_unlabeled, config.probe);
  }
  if (wants(which, "jointerr")) {
    report.joint = joint_error(params, data.source_train,
                               require_target_test(data, "jointerr"), config.probe);
  }
  if (wants(which, "indomain")) {
    // Single-domain protocol on the source: 80 % of source_train to train,
    // the remaining 20 % to test, source_valid as the validation split.
    const Dataset& s = data.source_train;
    const std::size_t n_train = s.size() * 4 / 5;
    std::vector<std::size_t> train_ids(n_train);
    std::vector<std::size_t> test_ids(s.size() - n_train);
    for (std::size_t i = 0; i < n_train; ++i) train_ids[i] = i;
    for (std::size_t i = n_train; i < s.size(); ++i) test_ids[i - n_train] = i;
    InDomainConfig cfg;
    cfg.fam = params.config;
    cfg.epochs = config.in_domain_epochs;
    cfg.lr = config.in_domain_lr;
    cfg.batch_size = config.in_domain_batch_size;
    cfg.n_negatives = config.in_domain_negatives;
    cfg.seed = config.in_domain_seed;
    report.in_domain = in_domain_fd_test(subset(s, train_ids), data.source_valid,
                                         subset(s, test_ids), cfg, config.probe);
  }
  return report;
}

int cmd_synth(const ExperimentConfig& config, std::ostream& log) {
  require(config.synth.has_value(), ErrorCode::kConfig,
          "synth: config is missing required key 'synth'");
  std::vector<std::uint64_t> seeds = config.seeds;
  if (seeds.empty()) seeds.push_back(config.synth->seed);
  ExperimentConfig layout = config;
  layout.seeds = seeds;
  for (std::uint64_t seed : seeds) {
    SynthConfig s = *config.synth;
    s.seed = seed;
    const SynthData data = generate(s);
    const fs::path dir = run_dir(layout, seed);
    fs::create_directories(dir);
    Manifest manifest;
    manifest.base_dir = dir;
    const std::pair<const Dataset*, DatasetRole> files[] = {
        {&data.source_train, DatasetRole::kSourceTrain},
        {&data.source_valid, DatasetRole::kSourceValid},
        {&data.target_unlabeled, DatasetRole::kTargetUnlabeled},
        {&data.target_test, DatasetRole::kTargetTest},
    };
    for (const auto& [dataset, role] : files) {
      const std::string name = std::string(to_string(role)) + ".fset";
      save_dataset(*dataset, dir / name);
      manifest.roles[role] = {name, dataset->domain_tag()};
    }
    manifest.write(dir / "manifest.json");
    log << "synth seed " << seed << ": " << data.source_train.size() << " / "
        << data.source_valid.size() << " / " << data.target_unlabeled.size() << " / "
        << data.target_test.size() << " records -> " << dir.string() << '\n';
  }
  return kExitOk;
}

int cmd_train(const ExperimentConfig& config, std::ostream& log) {
  std::vector<double> target_acc;
  std::vector<double> valid_acc;
  std::vector<double> intra;
  ojson runs = ojson::array();
  for (std::uint64_t seed : config.run_seeds()) {
    ExperimentConfig run = config;
    run.train.seed = seed;
    if (run.synth) run.synth->seed = seed;
    run.seeds.clear();
    const ExperimentData data = experiment_data(config, seed);
    const TrainResult result = train(run.train, data);

    const fs::path dir = run_dir(config, seed);
    fs::create_directories(dir);
    write_text(dir / "trace.csv", result.trace.to_csv());
    save_checkpoint(result.params, dir / "checkpoint.fckp");
    write_text(dir / "config.json", to_json(run).dump(2) + "\n");

    const EpochRecord& last = result.trace.epochs.back();
    valid_acc.push_back(last.valid_accuracy);
    intra.push_back(last.intra_class);
    ojson entry = {{"seed", seed},
                   {"dir", dir.generic_string()},
                   {"valid_accuracy", last.valid_accuracy},
                   {"L_intra_class", last.intra_class}};
    log << "train " << to_string(config.train.method) << " seed " << seed
        << ": valid_acc=" << short_fmt(last.valid_accuracy);
    if (last.target_accuracy) {
      target_acc.push_back(*last.target_accuracy);
      entry["target_accuracy"] = *last.target_accuracy;
      log << " target_acc=" << short_fmt(*last.target_accuracy);
    }
    log << " -> " << dir.string() << '\n';
    runs.push_back(std::move(entry));
  }
  ojson summary = {{"method", std::string(to_string(config.train.method))},
                   {"runs", runs},
                   {"valid_accuracy", stats_json(summarize(valid_acc))},
                   {"L_intra_class", stats_json(summarize(intra))}};
  if (!target_acc.empty()) summary["target_accuracy"] = stats_json(summarize(target_acc));
  write_text(config.out / "summary.json", summary.dump(2) + "\n");
  return kExitOk;
}

int cmd_diagnose(const ExperimentConfig& config, const DiagnoseOptions& options,
                 std::ostream& log) {
  const std::vector<std::string> which =
      options.which.empty() ? config.diagnostics.which : options.which;

  if (options.sweep.empty()) {
    require(options.checkpoint.has_value(), ErrorCode::kConfig,
            "diagnose needs --checkpoint or --sweep");
    const FamParams params = load_checkpoint(*options.checkpoint);
    const ExperimentData data = experiment_data(config, config.train.seed);
    const std::string key =
        options.key.empty() ? options.checkpoint->stem().string() : options.key;
    ojson report;
    report[key] = run_diagnostics(params, data, which, config.diagnostics).to_json();
    const std::string text = report.dump(2) + "\n";
    write_text(config.out / "report.json", text);
    log << text;
    return kExitOk;
  }

  std::string csv = "method,seed";
  for (const auto& [name, value] : report_columns(DiagnosticReport{})) csv += "," + name;
  csv += "\n";
  ojson report = ojson::object();
  for (Method method : options.sweep) {
    std::map<std::string, std::vector<double>> columns;
    ojson per_seed = ojson::array();
    for (std::uint64_t seed : config.run_seeds()) {
      TrainConfig tc = config.train;
      tc.method = method;
      tc.seed = seed;
      const ExperimentData data = experiment_data(config, seed);
      const TrainResult result = train(tc, data);
      const DiagnosticReport r = run_diagnostics(result.params, data, which, config.diagnostics);
      csv += std::string(to_string(method)) + "," + std::to_string(seed);
      ojson row = r.to_json();
      row["seed"] = seed;
      for (const auto& [name, value] : report_columns(r)) {
        csv += ",";
        if (value) {
          csv += fmt(*value);
          columns[name].push_back(*value);
        }
      }
      csv += "\n";
      per_seed.push_back(std::move(row));
      log << "diagnose " << to_string(method) << " seed " << seed << ": " << r.to_json().dump()
          << '\n';
    }
    ojson entry = {{"per_seed", per_seed}};
    for (const auto& [name, value] : report_columns(DiagnosticReport{})) {
      (void)value;
      const auto it = columns.find(name);
      if (it != columns.end()) entry[name] = stats_json(summarize(it->second));
    }
    report[std::string(to_string(method))] = std::move(entry);
  }
  write_text(config.out / "sweep.csv", csv);
  write_text(config.out / "report.json", report.dump(2) + "\n");
  return kExitOk;
}

int cmd_gradcheck(const SuiteOptions& options, const std::optional<fs::path>& out,
                  std::ostream& log) {
  const SuiteReport report = run_gradcheck_suite(options);
  ojson j = {{"tolerance", report.tolerance}, {"passed", report.passed}};
  j["losses"] = ojson::array();
  for (const LossCheck& c : report.losses) {
    char line[200];
    std::snprintf(line, sizeof(line), "%-12s max_rel_error=%.3e worst=%-12s batches=%zu %s\n",
                  c.name.c_str(), c.max_rel_error, c.worst_tensor.c_str(), c.batches,
                  c.passed ? "PASS" : "FAIL");
    log << line;
    j["losses"].push_back({{"name", c.name},
                           {"max_rel_error", c.max_rel_error},
                           {"worst_tensor", c.worst_tensor},
                           {"batches", c.batches},
                           {"passed", c.passed}});
  }
  log << "gradcheck " << (report.passed ? "PASS" : "FAIL") << " at tolerance "
      << report.tolerance << '\n';
  if (out) write_text(*out / "gradcheck.json", j.dump(2) + "\n");
  return report.passed ? kExitOk : kExitNumeric;
}

}  // namespace cfd::cli

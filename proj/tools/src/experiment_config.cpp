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

#include "cfd_cli/experiment_config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "cfd/error.hpp"

namespace cfd::cli {

namespace {

using json = nlohmann::json;

// 1-based line of the first `"key"` token in the text, or 0 when absent.
std::size_t line_of(std::string_view text, std::string_view key) {
  const std::string token = "\"" + std::string(key) + "\"";
  const auto pos = text.find(token);
  if (pos == std::string_view::npos) return 0;
  return static_cast<std::size_t>(std::count(text.begin(), text.begin() + pos, '\n')) + 1;
}

class Section {
 public:
  Section(const json& node, std::string path, std::string_view text, const std::string& origin)
      : node_(node), path_(std::move(path)), text_(text), origin_(origin) {
    if (!node_.is_object()) error(path_, "'" + path_ + "' must be an object");
  }

  template <typename T>
  void read(const char* key, T& target) {
    seen_.insert(key);
    const auto it = node_.find(key);
    if (it == node_.end()) return;
    try {
      target = it->template get<T>();
    } catch (const json::exception&) {
      error(key, "'" + qualified(key) + "' has the wrong type");
    }
  }

  bool has(const char* key) const { return node_.contains(key); }

  Section child(const char* key) {
    seen_.insert(key);
    return Section(node_.at(key), qualified(key), text_, origin_);
  }

  void finish() const {
    for (const auto& [key, value] : node_.items()) {
      if (!seen_.count(key)) error(key, "unknown key '" + qualified(key) + "'");
    }
  }

  [[noreturn]] void error(std::string_view key, const std::string& message) const {
    const std::size_t line = line_of(text_, key);
    std::string where = origin_;
    if (line > 0) where += ":" + std::to_string(line);
    fail(ErrorCode::kConfig, where + ": " + message);
  }

 private:
  std::string qualified(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  const json& node_;
  std::string path_;
  std::string_view text_;
  const std::string& origin_;
  std::set<std::string, std::less<>> seen_;
};

template <typename Enum, typename Parse>
void read_enum(Section& s, const char* key, Enum& target, Parse parse) {
  if (!s.has(key)) {
    std::string unused;
    s.read(key, unused);
    return;
  }
  std::string name;
  s.read(key, name);
  try {
    target = parse(name);
  } catch (const Error& e) {
    s.error(key, e.what());
  }
}

SynthConfig read_synth(Section s) {
  SynthConfig c;
  s.read("n_classes", c.n_classes);
  s.read("n_layers", c.n_layers);
  s.read("dim", c.dim);
  s.read("n_source", c.n_source);
  s.read("n_target", c.n_target);
  s.read("class_sep", c.class_sep);
  s.read("domain_shift", c.domain_shift);
  s.read("layer_noise_profile", c.layer_noise_profile);
  s.read("seed", c.seed);
  s.read("valid_fraction", c.valid_fraction);
  s.read("rotation_per_shift", c.rotation_per_shift);
  s.read("translation_per_shift", c.translation_per_shift);
  s.finish();
  return c;
}

void read_fam(Section s, FamConfig& c) {
  s.read("n_layers_used", c.n_layers_used);
  s.read("out_dim", c.out_dim);
  s.read("tau", c.tau);
  read_enum(s, "attention_mode", c.attention_mode, parse_attention_mode);
  s.read("per_layer_projection", c.per_layer_projection);
  s.finish();
}

void read_schedule(Section s, Schedule& c) {
  s.read("k0", c.k0);
  s.read("k_step", c.k_step);
  read_enum(s, "alpha_kind", c.alpha_kind, parse_alpha_kind);
  s.read("alpha_max", c.alpha_max);
  s.read("max_epoch", c.max_epoch);
  s.finish();
}

void read_train(Section s, TrainConfig& c) {
  read_enum(s, "method", c.method, parse_method);
  if (s.has("fam")) read_fam(s.child("fam"), c.fam);
  if (s.has("schedule")) read_schedule(s.child("schedule"), c.schedule);
  s.read("lr", c.lr);
  s.read("batch_cls", c.batch_cls);
  s.read("batch_mi", c.batch_mi);
  s.read("max_epochs", c.max_epochs);
  s.read("warmup_epochs", c.warmup_epochs);
  s.read("plateau_patience", c.plateau_patience);
  s.read("lambda", c.lambda);
  s.read("kl_weight", c.kl_weight);
  s.read("mmd_weight", c.mmd_weight);
  s.read("adv_weight", c.adv_weight);
  s.read("n_negatives", c.n_negatives);
  s.read("exclude_self_negatives", c.exclude_self_negatives);
  s.read("seed", c.seed);
  s.finish();
}

void read_diagnostics(Section s, DiagnosticsConfig& c) {
  if (s.has("which")) {
    std::vector<std::string> names;
    s.read("which", names);
    std::string joined;
    for (const auto& n : names) joined += (joined.empty() ? "" : ",") + n;
    try {
      c.which = parse_which(joined);
    } catch (const Error& e) {
      s.error("which", e.what());
    }
  } else {
    std::vector<std::string> unused;
    s.read("which", unused);
  }
  if (s.has("probe")) {
    Section p = s.child("probe");
    p.read("epochs", c.probe.epochs);
    p.read("lr", c.probe.lr);
    p.read("batch_size", c.probe.batch_size);
    p.read("train_fraction", c.probe.train_fraction);
    p.read("seed", c.probe.seed);
    p.read("repeats", c.probe.repeats);
    p.finish();
  }
  s.read("in_domain_epochs", c.in_domain_epochs);
  s.read("in_domain_lr", c.in_domain_lr);
  s.read("in_domain_batch_size", c.in_domain_batch_size);
  s.read("in_domain_negatives", c.in_domain_negatives);
  s.read("in_domain_seed", c.in_domain_seed);
  s.finish();
}

}  // namespace

std::vector<std::uint64_t> ExperimentConfig::run_seeds() const {
  if (seeds.empty()) return {train.seed};
  return seeds;
}

std::vector<std::string> parse_which(std::string_view list) {
  std::vector<std::string> out;
  std::stringstream in{std::string(list)};
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    if (item == "all") {
      out.assign(std::begin(kDiagnosticNames), std::end(kDiagnosticNames));
      return out;
    }
    const bool known = std::any_of(std::begin(kDiagnosticNames), std::end(kDiagnosticNames),
                                   [&](const char* n) { return item == n; });
    require(known, ErrorCode::kConfig, "unknown diagnostic '" + item + "'");
    if (std::find(out.begin(), out.end(), item) == out.end()) out.push_back(item);
  }
  require(!out.empty(), ErrorCode::kConfig, "no diagnostics selected");
  return out;
}

ExperimentConfig parse_experiment_config(std::string_view text, const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::kConfig, origin + ": " + e.what());
  }
  ExperimentConfig config;
  Section top(root, "", text, origin);
  if (top.has("synth")) config.synth = read_synth(top.child("synth"));
  if (top.has("manifest")) {
    std::string path;
    top.read("manifest", path);
    config.manifest = path;
  } else {
    std::string unused;
    top.read("manifest", unused);
  }
  if (top.has("train")) read_train(top.child("train"), config.train);
  if (top.has("diagnostics")) read_diagnostics(top.child("diagnostics"), config.diagnostics);
  std::string out = config.out.string();
  top.read("out", out);
  config.out = out;
  top.read("seeds", config.seeds);
  top.finish();
  if (config.synth && config.manifest) {
    top.error("manifest", "'synth' and 'manifest' are mutually exclusive");
  }
  return config;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::kConfig, "cannot read config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_experiment_config(buffer.str(), path.string());
}

nlohmann::ordered_json to_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  if (c.synth) {
    const SynthConfig& s = *c.synth;
    j["synth"] = {{"n_classes", s.n_classes},
                  {"n_layers", s.n_layers},
                  {"dim", s.dim},
                  {"n_source", s.n_source},
                  {"n_target", s.n_target},
                  {"class_sep", s.class_sep},
                  {"domain_shift", s.domain_shift},
                  {"layer_noise_profile", s.layer_noise_profile},
                  {"seed", s.seed},
                  {"valid_fraction", s.valid_fraction},
                  {"rotation_per_shift", s.rotation_per_shift},
                  {"translation_per_shift", s.translation_per_shift}};
  }
  if (c.manifest) j["manifest"] = c.manifest->string();
  const TrainConfig& t = c.train;
  j["train"] = {
      {"method", std::string(to_string(t.method))},
      {"fam",
       {{"n_layers_used", t.fam.n_layers_used},
        {"out_dim", t.fam.out_dim},
        {"tau", t.fam.tau},
        {"attention_mode", std::string(to_string(t.fam.attention_mode))},
        {"per_layer_projection", t.fam.per_layer_projection}}},
      {"schedule",
       {{"k0", t.schedule.k0},
        {"k_step", t.schedule.k_step},
        {"alpha_kind", std::string(to_string(t.schedule.alpha_kind))},
        {"alpha_max", t.schedule.alpha_max},
        {"max_epoch", t.schedule.max_epoch}}},
      {"lr", t.lr},
      {"batch_cls", t.batch_cls},
      {"batch_mi", t.batch_mi},
      {"max_epochs", t.max_epochs},
      {"warmup_epochs", t.warmup_epochs},
      {"plateau_patience", t.plateau_patience},
      {"lambda", t.lambda},
      {"kl_weight", t.kl_weight},
      {"mmd_weight", t.mmd_weight},
      {"adv_weight", t.adv_weight},
      {"n_negatives", t.n_negatives},
      {"exclude_self_negatives", t.exclude_self_negatives},
      {"seed", t.seed}};
  const DiagnosticsConfig& d = c.diagnostics;
  j["diagnostics"] = {{"which", d.which},
                      {"probe",
                       {{"epochs", d.probe.epochs},
                        {"lr", d.probe.lr},
                        {"batch_size", d.probe.batch_size},
                        {"train_fraction", d.probe.train_fraction},
                        {"seed", d.probe.seed},
                        {"repeats", d.probe.repeats}}},
                      {"in_domain_epochs", d.in_domain_epochs},
                      {"in_domain_lr", d.in_domain_lr},
                      {"in_domain_batch_size", d.in_domain_batch_size},
                      {"in_domain_negatives", d.in_domain_negatives},
                      {"in_domain_seed", d.in_domain_seed}};
  j["out"] = c.out.string();
  j["seeds"] = c.seeds;
  return j;
}

}  // namespace cfd::cli

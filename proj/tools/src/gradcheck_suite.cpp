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

#include "cfd_cli/gradcheck_suite.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include "cfd/error.hpp"
#include "cfd/fam.hpp"
#include "cfd/grad_check.hpp"
#include "cfd/objectives.hpp"
#include "cfd/rng.hpp"

namespace cfd::cli {

namespace {

constexpr std::size_t kBatch = 6;
constexpr std::size_t kClasses = 3;
constexpr std::size_t kLayers = 3;
constexpr std::size_t kInDim = 5;
constexpr std::size_t kOutDim = 4;
constexpr double kReversal = 0.01;

struct Toy {
  FamParams params;
  Dataset source;
  Dataset target;
  std::vector<FeatureRecord> source_records;
  std::vector<FeatureRecord> target_records;
  std::vector<LabeledExample> source_examples;
  std::vector<LabeledExample> pseudo_examples;
  std::vector<LabeledExample> members;
  NegativeSet negatives;
  ClassCenters centers;
};

Dataset random_dataset(Rng& rng, DatasetRole role) {
  std::vector<float> values(kBatch * kLayers * kInDim);
  for (float& v : values) v = static_cast<float>(rng.normal());
  std::vector<std::int32_t> labels;
  if (role_requires_labels(role)) {
    for (std::size_t i = 0; i < kBatch; ++i) labels.push_back(static_cast<std::int32_t>(rng.below(kClasses)));
  }
  return Dataset::create(kLayers, kInDim, kClasses, std::move(values), std::move(labels), role,
                         "toy");
}

Toy make_toy(std::uint64_t seed, std::size_t batch_index) {
  Rng rng = Rng(seed).fork(batch_index + 1);
  FamConfig cfg;
  cfg.in_dim = kInDim;
  cfg.out_dim = kOutDim;
  cfg.n_layers_used = 2 + batch_index % 2;
  cfg.tau = rng.uniform(0.3, 1.5);
  cfg.attention_mode = static_cast<AttentionMode>(batch_index % 3);
  cfg.per_layer_projection = batch_index % 2 == 1;

  Toy toy{FamParams::init(cfg, kClasses, rng), {}, {}, {}, {}, {}, {}, {}, {}, {}};
  for (ParamTensor* t : toy.params.tensors()) {
    for (double& v : t->value.flat()) v = 0.6 * rng.normal();
  }
  toy.source = random_dataset(rng, DatasetRole::kSourceTrain);
  toy.target = random_dataset(rng, DatasetRole::kTargetUnlabeled);
  for (std::size_t i = 0; i < kBatch; ++i) {
    toy.source_records.push_back(toy.source.record(i));
    toy.target_records.push_back(toy.target.record(i));
    toy.pseudo_examples.push_back({toy.target.record(i), static_cast<std::size_t>(rng.below(kClasses))});
  }
  toy.source_examples = labeled_examples(toy.source);
  toy.members = toy.source_examples;
  toy.members.insert(toy.members.end(), toy.pseudo_examples.begin(), toy.pseudo_examples.end());
  toy.negatives = sample_negatives(kBatch, 4, rng);

  // Frozen centers, nudged off the members so no distance sits at the kink.
  toy.centers = class_centers(toy.params, toy.members);
  for (std::size_t c = 0; c < kClasses; ++c) {
    if (!toy.centers.present(c)) {
      toy.centers.counts[c] = 1;
    }
    for (double& v : toy.centers.centers.row(c)) v += 0.1 * rng.normal();
  }
  return toy;
}

using Evaluator = std::function<double(Toy&, double grad_scale)>;

struct LossEntry {
  const char* name;
  Evaluator eval;
  bool reversal = false;
};

const std::vector<LossEntry>& registry() {
  static const std::vector<LossEntry> entries = {
      {"source_ce", [](Toy& t, double s) { return source_ce(t.params, t.source_examples, s); }},
      {"pseudo_ce",
       [](Toy& t, double s) { return pseudo_ce(t.params, t.pseudo_examples, 0.7, s); }},
      {"entropy", [](Toy& t, double s) { return entropy_loss(t.params, t.target_records, s); }},
      {"nce_fd",
       [](Toy& t, double s) { return nce_fd_loss(t.params, t.target_records, t.negatives, s).loss; }},
      {"intra_class",
       [](Toy& t, double s) { return intra_class_loss(t.params, t.members, t.centers, s); }},
      {"kl",
       [](Toy& t, double s) { return kl_baseline(t.params, t.source_records, t.target_records, s); }},
      {"mmd",
       [](Toy& t, double s) { return mmd_baseline(t.params, t.source_records, t.target_records, s); }},
      {"adv",
       [](Toy& t, double s) {
         return adv_baseline(t.params, t.source_records, t.target_records, kReversal, s);
       },
       true},
      {"cfd",
       [](Toy& t, double s) {
         return cfd_loss(t.params, t.target_records, t.members, t.centers, t.negatives, 1.3, s)
             .total;
       }},
  };
  return entries;
}

}  // namespace

std::vector<std::string> registered_losses() {
  std::vector<std::string> names;
  for (const auto& e : registry()) names.emplace_back(e.name);
  return names;
}

SuiteReport run_gradcheck_suite(const SuiteOptions& options) {
  if (!options.inject_fault.empty()) {
    const auto names = registered_losses();
    require(std::find(names.begin(), names.end(), options.inject_fault) != names.end(),
            ErrorCode::kConfig, "inject-fault: unknown loss '" + options.inject_fault + "'");
  }
  require(options.batches >= 1, ErrorCode::kConfig, "gradcheck needs at least one batch");

  SuiteReport report;
  report.tolerance = options.tolerance;
  for (const LossEntry& entry : registry()) {
    LossCheck check;
    check.name = entry.name;
    const double backward_sign = options.inject_fault == entry.name ? -1.0 : 1.0;
    for (std::size_t b = 0; b < options.batches; ++b) {
      Toy toy = make_toy(options.seed, b);
      GradCheckOptions gc;
      gc.tolerance = options.tolerance;
      if (entry.reversal) {
        for (ParamTensor* t : toy.params.fam_tensors()) gc.expected_scale[t->name] = -kReversal;
      }
      const LossFn fn = [&](bool with_grad) {
        return entry.eval(toy, with_grad ? backward_sign : 0.0);
      };
      const auto tensors = toy.params.tensors();
      const GradCheckReport r = grad_check(fn, tensors, gc);
      ++check.batches;
      for (const auto& e : r.entries) {
        if (e.max_rel_error >= check.max_rel_error) {
          check.max_rel_error = e.max_rel_error;
          check.worst_tensor = e.name;
        }
      }
      check.passed = check.passed && r.passed;
    }
    report.passed = report.passed && check.passed;
    report.losses.push_back(std::move(check));
  }
  return report;
}

}  // namespace cfd::cli

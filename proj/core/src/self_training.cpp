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

#include "cfd/self_training.hpp"

#include <algorithm>
#include <string>

#include "cfd/error.hpp"
#include "cfd/ops.hpp"

namespace cfd {

std::vector<std::size_t> PseudoLabelSet::class_counts(std::size_t n_classes) const {
  std::vector<std::size_t> counts(n_classes, 0);
  for (const auto& e : entries) ++counts.at(e.pseudo_label);
  return counts;
}

std::vector<LabeledExample> PseudoLabelSet::examples(const Dataset& target) const {
  std::vector<LabeledExample> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back({target.record(e.record_id), e.pseudo_label});
  return out;
}

std::string_view to_string(AlphaKind kind) {
  return kind == AlphaKind::kLinear ? "linear" : "quadratic";
}

AlphaKind parse_alpha_kind(std::string_view name) {
  if (name == "linear") return AlphaKind::kLinear;
  if (name == "quadratic") return AlphaKind::kQuadratic;
  fail(ErrorCode::kConfig, "unknown alpha_kind '" + std::string(name) + "'");
}

std::vector<RankedEntry> rank(const FamParams& params, const Dataset& target) {
  require(!target.empty(), ErrorCode::kInvalidArgument, "rank: empty target set");
  std::vector<RankedEntry> out(target.size());
  for (std::size_t i = 0; i < target.size(); ++i) {
    const ClassifierPass pass = classifier_forward(params, target.record(i));
    const auto best = std::max_element(pass.probs.begin(), pass.probs.end());
    out[i] = {i, static_cast<std::size_t>(best - pass.probs.begin()), entropy(pass.probs)};
  }
  std::sort(out.begin(), out.end(), [](const RankedEntry& a, const RankedEntry& b) {
    return a.entropy < b.entropy || (a.entropy == b.entropy && a.record_id < b.record_id);
  });
  return out;
}

PseudoLabelSet diversify(std::span<const RankedEntry> ranked, std::ptrdiff_t k,
                         std::size_t n_classes) {
  require(k >= 0, ErrorCode::kInvalidArgument, "diversify: k must be >= 0");
  std::vector<std::vector<const RankedEntry*>> by_class(n_classes);
  for (const auto& e : ranked) {
    require(e.pseudo_label < n_classes, ErrorCode::kBadLabel, "diversify: label out of range");
    by_class[e.pseudo_label].push_back(&e);
  }
  // Within a class keep ascending entropy; stable on the incoming order.
  for (auto& members : by_class) {
    std::stable_sort(members.begin(), members.end(),
                     [](const RankedEntry* a, const RankedEntry* b) { return a->entropy < b->entropy; });
  }
  PseudoLabelSet set;
  set.k_target = static_cast<std::size_t>(k);
  std::vector<std::size_t> next(n_classes, 0);
  bool progressed = true;
  while (set.entries.size() < set.k_target && progressed) {
    progressed = false;
    for (std::size_t c = 0; c < n_classes && set.entries.size() < set.k_target; ++c) {
      if (next[c] >= by_class[c].size()) continue;
      set.entries.push_back(*by_class[c][next[c]++]);
      progressed = true;
    }
  }
  return set;
}

std::size_t k_at(const Schedule& schedule, int epoch, std::size_t target_size) {
  require(epoch >= 0, ErrorCode::kInvalidArgument, "k_at: negative epoch");
  const std::size_t k = schedule.k0 + schedule.k_step * static_cast<std::size_t>(epoch);
  return std::min(k, target_size);
}

double alpha_at(const Schedule& schedule, int epoch) {
  require(epoch >= 0, ErrorCode::kInvalidArgument, "alpha_at: negative epoch");
  const double progress =
      schedule.max_epoch <= 0
          ? 1.0
          : std::min(static_cast<double>(epoch) / static_cast<double>(schedule.max_epoch), 1.0);
  const double shaped = schedule.alpha_kind == AlphaKind::kLinear ? progress : progress * progress;
  return schedule.alpha_max * shaped;
}

}  // namespace cfd

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

#ifndef CFD_SELF_TRAINING_HPP_
#define CFD_SELF_TRAINING_HPP_

// Pseudo-labelling by rank-diversify. Rank sorts the target set by prediction
// entropy; diversify then takes the lowest-entropy member of each predicted
// class in turn (class 0, 1, ..., wrapping) until K are chosen.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "cfd/fam.hpp"
#include "cfd/feature_store.hpp"
#include "cfd/objectives.hpp"

namespace cfd {

struct RankedEntry {
  std::size_t record_id = 0;
  std::size_t pseudo_label = 0;
  double entropy = 0.0;

  friend bool operator==(const RankedEntry&, const RankedEntry&) = default;
};

struct PseudoLabelSet {
  std::vector<RankedEntry> entries;  // in selection order
  int epoch = 0;
  std::size_t k_target = 0;

  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }
  std::vector<std::size_t> class_counts(std::size_t n_classes) const;
  // The pseudo-labelled records of `target` as labelled examples.
  std::vector<LabeledExample> examples(const Dataset& target) const;
};

enum class AlphaKind { kLinear, kQuadratic };

std::string_view to_string(AlphaKind kind);
AlphaKind parse_alpha_kind(std::string_view name);

struct Schedule {
  std::size_t k0 = 950;
  std::size_t k_step = 100;
  AlphaKind alpha_kind = AlphaKind::kLinear;
  double alpha_max = 1.0;
  int max_epoch = 10;
};

// Argmax pseudo labels, sorted by ascending entropy, ties by record id.
std::vector<RankedEntry> rank(const FamParams& params, const Dataset& target);

PseudoLabelSet diversify(std::span<const RankedEntry> ranked, std::ptrdiff_t k,
                         std::size_t n_classes);

// k0 + k_step * epoch, capped at target_size.
std::size_t k_at(const Schedule& schedule, int epoch, std::size_t target_size);

// alpha_max * min(epoch / max_epoch, 1), squared inside for the quadratic kind.
double alpha_at(const Schedule& schedule, int epoch);

}  // namespace cfd

#endif  // CFD_SELF_TRAINING_HPP_

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

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "cfd/error.hpp"
#include "cfd/ops.hpp"
#include "cfd/self_training.hpp"
#include "test_support.hpp"

namespace cfd {
namespace {

// Independent formulation of round-robin selection: an entry that is the r-th
// best of its class is picked in pass r, and within a pass classes go in
// ascending order. Sorting by (r, class) and taking the first k gives the
// selection order.
std::vector<RankedEntry> round_robin_oracle(std::vector<RankedEntry> ranked, std::size_t k) {
  std::stable_sort(ranked.begin(), ranked.end(), [](const RankedEntry& a, const RankedEntry& b) {
    return std::tie(a.pseudo_label, a.entropy) < std::tie(b.pseudo_label, b.entropy);
  });
  std::map<std::size_t, std::size_t> seen;
  std::vector<std::tuple<std::size_t, std::size_t, RankedEntry>> keyed;
  for (const auto& e : ranked) keyed.emplace_back(seen[e.pseudo_label]++, e.pseudo_label, e);
  std::stable_sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
    return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
  });
  std::vector<RankedEntry> out;
  for (std::size_t i = 0; i < std::min(k, keyed.size()); ++i) out.push_back(std::get<2>(keyed[i]));
  return out;
}

std::vector<RankedEntry> entries_with_counts(const std::vector<std::size_t>& counts) {
  std::vector<RankedEntry> out;
  std::size_t id = 0;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    for (std::size_t j = 0; j < counts[c]; ++j) {
      out.push_back({id, c, 0.1 * static_cast<double>(id) + 0.01});
      ++id;
    }
  }
  std::sort(out.begin(), out.end(),
            [](const RankedEntry& a, const RankedEntry& b) { return a.entropy < b.entropy; });
  return out;
}

TEST(Diversify, ZeroKIsEmptyAndNegativeKThrows) {
  const auto ranked = entries_with_counts({3, 3});
  EXPECT_TRUE(diversify(ranked, 0, 2).empty());
  EXPECT_THROW(diversify(ranked, -1, 2), Error);
}

TEST(Diversify, BalancedCaseTakesEachClassBest) {
  Rng rng(1);
  std::vector<RankedEntry> ranked;
  for (std::size_t i = 0; i < 15; ++i) ranked.push_back({i, i % 3, rng.uniform()});
  std::sort(ranked.begin(), ranked.end(),
            [](const RankedEntry& a, const RankedEntry& b) { return a.entropy < b.entropy; });
  const PseudoLabelSet set = diversify(ranked, 9, 3);
  EXPECT_EQ(set.class_counts(3), (std::vector<std::size_t>{3, 3, 3}));
  for (std::size_t c = 0; c < 3; ++c) {
    std::vector<double> best;
    for (const auto& e : ranked) {
      if (e.pseudo_label == c && best.size() < 3) best.push_back(e.entropy);
    }
    std::vector<double> got;
    for (const auto& e : set.entries) {
      if (e.pseudo_label == c) got.push_back(e.entropy);
    }
    EXPECT_EQ(got, best);
  }
}

TEST(Diversify, UnevenClassCountsFollowRoundRobin) {
  const auto ranked = entries_with_counts({5, 2, 5});
  const PseudoLabelSet set = diversify(ranked, 9, 3);
  EXPECT_EQ(set.class_counts(3), (std::vector<std::size_t>{4, 2, 3}));
  EXPECT_EQ(set.entries, round_robin_oracle(ranked, 9));
}

TEST(Diversify, ExhaustiveSmallInstancesMatchOracle) {
  // Every label assignment of n <= 7 entries over 3 classes, every k.
  for (std::size_t n = 1; n <= 7; ++n) {
    std::size_t assignments = 1;
    for (std::size_t i = 0; i < n; ++i) assignments *= 3;
    for (std::size_t code = 0; code < assignments; ++code) {
      std::vector<RankedEntry> ranked;
      std::size_t rest = code;
      for (std::size_t i = 0; i < n; ++i) {
        ranked.push_back({i, rest % 3, static_cast<double>(i)});
        rest /= 3;
      }
      for (std::size_t k = 0; k <= n + 1; ++k) {
        ASSERT_EQ(diversify(ranked, static_cast<std::ptrdiff_t>(k), 3).entries,
                  round_robin_oracle(ranked, k))
            << "n=" << n << " code=" << code << " k=" << k;
      }
    }
  }
}

TEST(Diversify, RandomInstancesMatchOracle) {
  Rng rng(2);
  for (int t = 0; t < 500; ++t) {
    const std::size_t n = 8 + rng.below(13);
    const std::size_t classes = 2 + rng.below(4);
    std::vector<RankedEntry> ranked;
    for (std::size_t i = 0; i < n; ++i) ranked.push_back({i, rng.below(classes), rng.uniform()});
    std::sort(ranked.begin(), ranked.end(),
              [](const RankedEntry& a, const RankedEntry& b) { return a.entropy < b.entropy; });
    const std::size_t k = rng.below(n + 2);
    ASSERT_EQ(diversify(ranked, static_cast<std::ptrdiff_t>(k), classes).entries,
              round_robin_oracle(ranked, k));
  }
}

TEST(Diversify, BalanceWithinOneWhileEveryClassHasCandidates) {
  Rng rng(3);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t classes = 2 + rng.below(4);
    std::vector<RankedEntry> ranked;
    for (std::size_t i = 0; i < 60; ++i) ranked.push_back({i, rng.below(classes), rng.uniform()});
    std::sort(ranked.begin(), ranked.end(),
              [](const RankedEntry& a, const RankedEntry& b) { return a.entropy < b.entropy; });
    std::vector<std::size_t> available(classes, 0);
    for (const auto& e : ranked) ++available[e.pseudo_label];
    const std::size_t k = rng.below(61);
    const auto counts = diversify(ranked, static_cast<std::ptrdiff_t>(k), classes).class_counts(classes);
    std::size_t lo = k, hi = 0;
    for (std::size_t c = 0; c < classes; ++c) {
      // Classes with spare candidates must sit within one of each other.
      if (counts[c] < available[c]) lo = std::min(lo, counts[c]);
      hi = std::max(hi, counts[c]);
    }
    if (lo != k) EXPECT_LE(hi, lo + 1);
  }
}

TEST(Rank, ConfidentRecordComesFirstAndTiesUseId) {
  Rng rng(4);
  FamConfig c;
  c.n_layers_used = 2;
  c.in_dim = 3;
  c.out_dim = 3;
  FamParams p = testing::random_params(c, 3, rng);
  p.cls_w.value.fill(0.0);
  p.cls_b.value.fill(0.0);
  // Identical classifier outputs everywhere: order falls back to record id.
  const Dataset d = testing::random_dataset(rng, 6, 2, 3, 3, DatasetRole::kTargetUnlabeled);
  const auto tied = rank(p, d);
  for (std::size_t i = 0; i < tied.size(); ++i) EXPECT_EQ(tied[i].record_id, i);

  // Large classifier weights: records separate by confidence.
  FamParams q = testing::random_params(c, 3, rng, 3.0);
  const auto ranked = rank(q, d);
  for (std::size_t i = 1; i < ranked.size(); ++i) EXPECT_LE(ranked[i - 1].entropy, ranked[i].entropy);
}

TEST(Rank, MatchesIndependentEntropySort) {
  Rng rng(5);
  FamConfig c;
  c.n_layers_used = 2;
  c.in_dim = 4;
  c.out_dim = 3;
  const FamParams p = testing::random_params(c, 3, rng, 1.5);
  const Dataset d = testing::random_dataset(rng, 20, 3, 4, 3, DatasetRole::kTargetUnlabeled);
  std::vector<std::pair<double, std::size_t>> expect;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const FamOutput out = fam_forward(p, d.record(i));
    Vec logits(3);
    for (std::size_t k = 0; k < 3; ++k) {
      logits[k] = p.cls_b.value(k, 0);
      for (std::size_t j = 0; j < 3; ++j) logits[k] += p.cls_w.value(k, j) * out.z[j];
    }
    const Vec probs = softmax(logits);
    double h = 0.0;
    for (double v : probs) h -= v * std::log(v);
    expect.emplace_back(h, i);
  }
  std::sort(expect.begin(), expect.end());
  const auto ranked = rank(p, d);
  for (std::size_t i = 0; i < 20; ++i) {
    EXPECT_EQ(ranked[i].record_id, expect[i].second);
    EXPECT_NEAR(ranked[i].entropy, expect[i].first, 1e-13);
  }
}

TEST(Schedule, RetainedCountGrowsAndCaps) {
  Schedule s;
  EXPECT_EQ(k_at(s, 0, 100000), 950u);
  EXPECT_EQ(k_at(s, 5, 100000), 1450u);
  EXPECT_EQ(k_at(s, 2, 1200), 1150u);
  EXPECT_EQ(k_at(s, 3, 1200), 1200u);
  EXPECT_EQ(k_at(s, 9, 1200), 1200u);
  EXPECT_THROW(k_at(s, -1, 10), Error);
}

TEST(Schedule, AlphaRamp) {
  Schedule s;
  s.max_epoch = 10;
  s.alpha_max = 0.8;
  for (AlphaKind kind : {AlphaKind::kLinear, AlphaKind::kQuadratic}) {
    s.alpha_kind = kind;
    EXPECT_EQ(alpha_at(s, 0), 0.0);
    EXPECT_DOUBLE_EQ(alpha_at(s, 10), 0.8);
    EXPECT_DOUBLE_EQ(alpha_at(s, 25), 0.8);
  }
  EXPECT_DOUBLE_EQ(alpha_at(s, 5), 0.2);
  s.alpha_kind = AlphaKind::kLinear;
  EXPECT_DOUBLE_EQ(alpha_at(s, 5), 0.4);
  EXPECT_EQ(parse_alpha_kind("quadratic"), AlphaKind::kQuadratic);
  EXPECT_THROW(parse_alpha_kind("cubic"), Error);
}

}  // namespace
}  // namespace cfd

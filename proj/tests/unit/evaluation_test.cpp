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

#include <cmath>
#include <numeric>

#include "cfd/datagen.hpp"
#include "cfd/error.hpp"
#include "cfd/evaluation.hpp"
#include "cfd/trainer.hpp"
#include "test_support.hpp"

namespace cfd {
namespace {

FamParams fresh_params(std::size_t dim, std::size_t layers, std::uint64_t seed) {
  FamConfig c;
  c.in_dim = dim;
  c.n_layers_used = layers;
  c.out_dim = 8;
  Rng rng(seed);
  return FamParams::init(c, 3, rng);
}

SynthData easy_data(std::uint64_t seed, double shift = 0.0) {
  SynthConfig c;
  c.n_source = 360;
  c.n_target = 300;
  c.dim = 6;
  c.n_layers = 2;
  c.layer_noise_profile = {0.3, 0.3};
  c.class_sep = 10.0;
  c.domain_shift = shift;
  c.seed = seed;
  return generate(c);
}

// Copy of `d` with every feature moved by `offset`.
Dataset shifted(const Dataset& d, float offset, DatasetRole role) {
  std::vector<float> values(d.values().begin(), d.values().end());
  for (float& v : values) v += offset;
  return Dataset::create(d.n_layers(), d.dim(), d.n_classes(), std::move(values),
                         std::vector<std::int32_t>(d.labels().begin(), d.labels().end()), role,
                         "shifted");
}

TEST(Accuracy, PerfectAndConstantPredictors) {
  Rng rng(1);
  FamParams p = fresh_params(4, 2, 1);
  Dataset d = testing::random_dataset(rng, 30, 2, 4, 3, DatasetRole::kTargetUnlabeled);
  const Predictions pred = predict(p, d);
  std::vector<std::int32_t> labels(pred.labels.begin(), pred.labels.end());
  const Dataset perfect = Dataset::create(2, 4, 3, std::vector<float>(d.values().begin(), d.values().end()),
                                          labels, DatasetRole::kTargetTest, "t");
  EXPECT_EQ(accuracy(p, perfect), 1.0);

  p.cls_w.value.fill(0.0);
  p.cls_b.value.fill(0.0);
  p.cls_b.value(0, 0) = 1.0;
  std::vector<std::int32_t> balanced(30);
  for (std::size_t i = 0; i < 30; ++i) balanced[i] = static_cast<std::int32_t>(i % 3);
  const Dataset bal = Dataset::create(2, 4, 3, std::vector<float>(d.values().begin(), d.values().end()),
                                      balanced, DatasetRole::kTargetTest, "t");
  EXPECT_DOUBLE_EQ(accuracy(p, bal), 1.0 / 3.0);
  EXPECT_THROW(accuracy(p, subset(bal, {})), Error);
}

TEST(ADistance, SameDomainSplitInHalfIsNearZero) {
  double mean = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const SynthData s = easy_data(seed);
    const Dataset& all = s.target_unlabeled;
    std::vector<std::size_t> a, b;
    for (std::size_t i = 0; i < all.size(); ++i) (i % 2 ? a : b).push_back(i);
    ProbeConfig probe;
    probe.seed = seed;
    const ADistanceResult r =
        a_distance(fresh_params(6, 2, seed), subset(all, a), subset(all, b), probe);
    EXPECT_GE(r.a_distance, 0.0);
    EXPECT_LE(r.a_distance, 2.0);
    EXPECT_EQ(r.a_distance, a_distance_from_error(r.domain_error));
    mean += r.a_distance / 5.0;
  }
  EXPECT_LT(mean, 0.3);
}

TEST(ADistance, DisjointDomainsAreNearTwo) {
  const SynthData s = easy_data(2);
  // Opposite offsets keep the two supports apart after the odd tanh maps too.
  const Dataset near = shifted(s.source_train, 4.0f, DatasetRole::kSourceTrain);
  const Dataset far = shifted(s.target_unlabeled, -4.0f, DatasetRole::kTargetUnlabeled);
  const ADistanceResult r = a_distance(fresh_params(6, 2, 2), near, far);
  EXPECT_GT(r.a_distance, 1.9);
  EXPECT_LT(r.domain_error, 0.025);
}

TEST(ADistance, NeedsTenExamplesPerDomain) {
  const SynthData s = easy_data(3);
  std::vector<std::size_t> nine(9);
  std::iota(nine.begin(), nine.end(), std::size_t{0});
  EXPECT_THROW(a_distance(fresh_params(6, 2, 3), s.source_train, subset(s.target_unlabeled, nine)),
               Error);
}

TEST(ADistance, FromErrorIsClamped) {
  EXPECT_EQ(a_distance_from_error(0.0), 2.0);
  EXPECT_EQ(a_distance_from_error(0.5), 0.0);
  EXPECT_EQ(a_distance_from_error(0.7), 0.0);
  EXPECT_DOUBLE_EQ(a_distance_from_error(0.25), 1.0);
}

TEST(JointError, IdenticalSeparableDomainsGiveNearZero) {
  const SynthData s = easy_data(4);
  const Dataset target = s.source_train.with_role(DatasetRole::kTargetTest, "copy");
  const JointErrorResult r = joint_error(fresh_params(6, 2, 4), s.source_train, target);
  EXPECT_LT(r.joint_error, 0.03);
  EXPECT_DOUBLE_EQ(r.joint_error, r.source_error + r.target_error);
}

TEST(JointError, RandomLabelsGiveChanceLevel) {
  Rng rng(5);
  const SynthData s = easy_data(5);
  auto scramble = [&](const Dataset& d, DatasetRole role) {
    std::vector<std::int32_t> labels(d.size());
    for (auto& l : labels) l = static_cast<std::int32_t>(rng.below(3));
    return Dataset::create(d.n_layers(), d.dim(), 3,
                           std::vector<float>(d.values().begin(), d.values().end()), labels, role, "r");
  };
  const JointErrorResult r = joint_error(fresh_params(6, 2, 5), scramble(s.source_train, DatasetRole::kSourceTrain),
                                         scramble(s.target_test, DatasetRole::kTargetTest));
  EXPECT_NEAR(r.joint_error, 2.0 * (1.0 - 1.0 / 3.0), 0.2);
}

TEST(JointError, NeedsTargetLabels) {
  const SynthData s = easy_data(6);
  EXPECT_THROW(joint_error(fresh_params(6, 2, 6), s.source_train, s.target_unlabeled), Error);
}

TEST(InDomain, SeparableDataGivesHighAccuracyOnBothPaths) {
  const SynthData s = easy_data(7);
  std::vector<std::size_t> train(240), test(60);
  std::iota(train.begin(), train.end(), std::size_t{0});
  std::iota(test.begin(), test.end(), std::size_t{240});
  InDomainConfig c;
  c.fam.n_layers_used = 2;
  c.fam.out_dim = 8;
  c.epochs = 10;
  c.lr = 1e-2;
  const InDomainResult r = in_domain_fd_test(subset(s.source_train, train), s.source_valid,
                                             subset(s.source_train, test), c);
  EXPECT_GT(r.fd_accuracy, 0.95);
  EXPECT_GT(r.supervised_accuracy, 0.95);
}

TEST(Summarize, SampleStatistics) {
  const SeedStats s = summarize({1.0, 2.0, 3.0, 4.0});
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_DOUBLE_EQ(s.stddev, std::sqrt(5.0 / 3.0));
  EXPECT_EQ(s.values.size(), 4u);
  EXPECT_EQ(summarize({7.0}).stddev, 0.0);
}

TEST(Summarize, MatchesRecomputationFromValues) {
  Rng rng(8);
  std::vector<double> v(7);
  for (double& x : v) x = rng.uniform();
  const SeedStats s = summarize(v);
  double mean = 0.0;
  for (double x : s.values) mean += x;
  mean /= static_cast<double>(s.values.size());
  double ss = 0.0;
  for (double x : s.values) ss += (x - mean) * (x - mean);
  EXPECT_NEAR(s.mean, mean, 1e-15);
  EXPECT_NEAR(s.stddev, std::sqrt(ss / 6.0), 1e-15);
}

TEST(DiagnosticReport, JsonHoldsOnlyComputedDiagnostics) {
  DiagnosticReport r;
  r.accuracy = 0.75;
  const auto j = r.to_json();
  EXPECT_EQ(j.at("accuracy"), 0.75);
  EXPECT_FALSE(j.contains("a_distance"));
  r.adist = ADistanceResult{0.1, a_distance_from_error(0.1)};
  EXPECT_TRUE(r.to_json().contains("a_distance"));
}

}  // namespace
}  // namespace cfd

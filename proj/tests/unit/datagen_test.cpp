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

#include "cfd/datagen.hpp"
#include "cfd/error.hpp"
#include "cfd/evaluation.hpp"
#include "test_support.hpp"

namespace cfd {
namespace {

// Mean over layers of each record, the input of a plain linear classifier.
Matrix layer_mean(const Dataset& d) {
  Matrix x(d.size(), d.dim());
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t l = 0; l < d.n_layers(); ++l) {
      for (std::size_t k = 0; k < d.dim(); ++k) x(i, k) += d.record(i).at(l, k) / d.n_layers();
    }
  }
  return x;
}

std::vector<std::size_t> labels_of(const Dataset& d) {
  std::vector<std::size_t> y;
  for (std::int32_t v : d.labels()) y.push_back(static_cast<std::size_t>(v));
  return y;
}

// Source-trained linear classifier: returns (source-valid accuracy, target accuracy).
std::pair<double, double> linear_transfer(const SynthData& d, std::uint64_t seed) {
  ProbeConfig probe;
  probe.train_fraction = 1.0;
  probe.seed = seed;
  const LinearProbe h = train_probe(layer_mean(d.source_train), labels_of(d.source_train),
                                    d.source_train.n_classes(), probe);
  return {1.0 - h.error(layer_mean(d.source_valid), labels_of(d.source_valid)),
          1.0 - h.error(layer_mean(d.target_test), labels_of(d.target_test))};
}

TEST(Datagen, SplitSizesAndRoles) {
  const SynthData d = generate(SynthConfig{});
  EXPECT_EQ(d.source_train.size(), 750u);
  EXPECT_EQ(d.source_valid.size(), 150u);
  EXPECT_EQ(d.target_unlabeled.size(), 900u);
  EXPECT_EQ(d.target_test.size(), 900u);
  EXPECT_FALSE(d.target_unlabeled.has_labels());
  EXPECT_TRUE(d.target_test.has_labels());
  EXPECT_EQ(d.source_train.n_layers(), 4u);
  EXPECT_EQ(d.source_train.dim(), 16u);
}

TEST(Datagen, SameSeedGivesByteIdenticalData) {
  SynthConfig c;
  c.n_source = 200;
  c.n_target = 150;
  const SynthData a = generate(c);
  const SynthData b = generate(c);
  EXPECT_EQ(encode_featset(a.source_train), encode_featset(b.source_train));
  EXPECT_EQ(encode_featset(a.source_valid), encode_featset(b.source_valid));
  EXPECT_EQ(encode_featset(a.target_unlabeled), encode_featset(b.target_unlabeled));
  EXPECT_EQ(encode_featset(a.target_test), encode_featset(b.target_test));
  c.seed = 2;
  EXPECT_NE(encode_featset(generate(c).source_train), encode_featset(a.source_train));
}

TEST(Datagen, ClassMeansArePairwiseClassSepApart) {
  SynthConfig c;
  c.class_sep = 6.0;
  const SynthModel m = synth_model(c);
  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t b = a + 1; b < 3; ++b) {
      double sq = 0.0;
      for (std::size_t k = 0; k < c.dim; ++k) {
        const double diff = m.source_means(a, k) - m.source_means(b, k);
        sq += diff * diff;
      }
      EXPECT_NEAR(std::sqrt(sq), 6.0, 1e-9);
    }
  }
}

TEST(Datagen, RotationIsOrthogonalAndShiftZeroIsIdentity) {
  SynthConfig c;
  const SynthModel m = synth_model(c);
  for (std::size_t i = 0; i < c.dim; ++i) {
    for (std::size_t j = 0; j < c.dim; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < c.dim; ++k) s += m.rotation(k, i) * m.rotation(k, j);
      EXPECT_NEAR(s, i == j ? 1.0 : 0.0, 1e-10);
    }
  }
  c.domain_shift = 0.0;
  const SynthModel z = synth_model(c);
  EXPECT_EQ(z.source_means, z.target_means);
  for (double t : z.translation) EXPECT_EQ(t, 0.0);
}

TEST(Datagen, RejectsDegenerateConfigs) {
  SynthConfig c;
  c.n_classes = 0;
  EXPECT_THROW(generate(c), Error);
  c = SynthConfig{};
  c.n_source = 0;
  EXPECT_THROW(generate(c), Error);
  c = SynthConfig{};
  c.layer_noise_profile = {1.0, 1.0};
  EXPECT_THROW(generate(c), Error);
  c = SynthConfig{};
  c.class_sep = 0.0;
  EXPECT_THROW(generate(c), Error);
  c = SynthConfig{};
  c.layer_noise_profile[0] = -1.0;
  EXPECT_THROW(generate(c), Error);
}

TEST(Datagen, NoShiftSourceClassifierTransfers) {
  double gap = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SynthConfig c;
    c.seed = seed;
    c.domain_shift = 0.0;
    c.layer_noise_profile = {0, 0, 0, 0};
    const auto [valid, target] = linear_transfer(generate(c), seed);
    gap += (valid - target) / 5.0;
  }
  EXPECT_LT(std::abs(gap), 0.02);
}

TEST(Datagen, MoreShiftDoesNotHelpSourceOnlyTransfer) {
  double previous = 1.0;
  for (double shift : {0.0, 1.0, 2.0, 3.0}) {
    double acc = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      SynthConfig c;
      c.seed = seed;
      c.domain_shift = shift;
      acc += linear_transfer(generate(c), seed).second / 5.0;
    }
    EXPECT_LE(acc, previous + 0.01) << "shift " << shift;
    previous = acc;
  }
}

TEST(Datagen, BayesOracleCeilingOnStandardBenchmark) {
  double mean = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SynthConfig c;
    c.seed = seed;
    const SynthModel m = synth_model(c);
    const double acc = testing::bayes_accuracy(m, m.target_means, generate(c).target_test);
    EXPECT_GT(acc, 0.98);
    mean += acc / 5.0;
  }
  // Two nearest means sit 6 apart with unit latent noise: pairwise error
  // Phi(-3 / sqrt(1 + ~0.05)) ~ 0.002 per neighbour.
  EXPECT_NEAR(mean, 0.996, 0.004);
}

}  // namespace
}  // namespace cfd

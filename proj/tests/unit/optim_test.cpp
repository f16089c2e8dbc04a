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
#include <limits>

#include "cfd/error.hpp"
#include "cfd/optim.hpp"

namespace cfd {
namespace {

TEST(Adam, ZeroGradientLeavesValuesButCountsStep) {
  ParamTensor p("p", 2, 2);
  p.value.fill(0.5);
  adam_step(p, 0.1);
  for (double v : p.value.flat()) EXPECT_EQ(v, 0.5);
  EXPECT_EQ(p.step, 1);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  ParamTensor p("p", 1, 1);
  p.grad(0, 0) = 1.0;
  adam_step(p, 0.001);
  EXPECT_NEAR(p.value(0, 0), -0.001, 1e-10);
}

TEST(Adam, MatchesScalarRecurrence) {
  ParamTensor p("p", 1, 1);
  double theta = 0.0, m = 0.0, v = 0.0;
  const double lr = 0.001, b1 = 0.9, b2 = 0.999, eps = 1e-8;
  for (int t = 1; t <= 10; ++t) {
    p.grad(0, 0) = 1.0;
    adam_step(p, lr);
    m = b1 * m + (1 - b1) * 1.0;
    v = b2 * v + (1 - b2) * 1.0;
    const double mh = m / (1 - std::pow(b1, t));
    const double vh = v / (1 - std::pow(b2, t));
    theta -= lr * mh / (std::sqrt(vh) + eps);
    EXPECT_NEAR(p.value(0, 0), theta, 1e-12);
  }
}

TEST(Adam, ZeroesGradientAfterStep) {
  ParamTensor p("p", 1, 3);
  p.grad.fill(2.0);
  adam_step(p, 0.01);
  for (double g : p.grad.flat()) EXPECT_EQ(g, 0.0);
}

TEST(Adam, NonFiniteGradientNamesTheTensor) {
  ParamTensor p("fam.att.w", 1, 2);
  p.grad(0, 1) = std::numeric_limits<double>::quiet_NaN();
  try {
    adam_step(p, 0.01);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonFiniteGradient);
    EXPECT_NE(std::string(e.what()).find("fam.att.w"), std::string::npos);
  }
}

TEST(Adam, DeterministicGivenState) {
  ParamTensor a("p", 2, 2), b("p", 2, 2);
  for (int t = 0; t < 5; ++t) {
    a.grad.fill(0.1 * t - 0.2);
    b.grad.fill(0.1 * t - 0.2);
    adam_step(a, 0.01);
    adam_step(b, 0.01);
  }
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.m, b.m);
  EXPECT_EQ(a.v, b.v);
}

TEST(LrPlateau, ConstantMetricHalvesAtEpochEleven) {
  LrPlateau plateau(1e-4, 10);
  std::vector<double> lr_used;
  for (int epoch = 0; epoch < 25; ++epoch) {
    lr_used.push_back(plateau.lr());
    plateau.observe(0.5);
  }
  // Epoch 0 sets the best value; epochs 1..10 fail to improve.
  for (int e = 0; e <= 10; ++e) EXPECT_EQ(lr_used[e], 1e-4) << e;
  EXPECT_EQ(lr_used[11], 0.5e-4);
  EXPECT_EQ(lr_used[21], 0.25e-4);
}

TEST(LrPlateau, ImprovementResetsCounter) {
  LrPlateau plateau(1.0, 3);
  EXPECT_FALSE(plateau.observe(0.1));
  EXPECT_FALSE(plateau.observe(0.1));
  EXPECT_FALSE(plateau.observe(0.2));
  EXPECT_EQ(plateau.epochs_without_improvement(), 0);
  EXPECT_FALSE(plateau.observe(0.2));
  EXPECT_FALSE(plateau.observe(0.2));
  EXPECT_TRUE(plateau.observe(0.2));
  EXPECT_EQ(plateau.lr(), 0.5);
}

}  // namespace
}  // namespace cfd

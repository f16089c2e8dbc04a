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

#include "cfd/grad_check.hpp"
#include "cfd/ops.hpp"
#include "cfd/rng.hpp"

namespace cfd {
namespace {

TEST(GradCheck, QuadraticMatchesExactly) {
  ParamTensor p("p", 3, 2);
  Rng rng(1);
  for (double& v : p.value.flat()) v = rng.normal();
  ParamTensor* params[] = {&p};
  const LossFn loss = [&](bool with_grad) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      s += p.value.flat()[i] * p.value.flat()[i];
      if (with_grad) p.grad.flat()[i] += 2 * p.value.flat()[i];
    }
    return s;
  };
  const auto report = grad_check(loss, params);
  EXPECT_TRUE(report.passed);
  EXPECT_LT(report.entries[0].max_abs_error, 1e-8);
}

TEST(GradCheck, RestoresValues) {
  ParamTensor p("p", 2, 2);
  p.value.fill(0.25);
  const Matrix before = p.value;
  ParamTensor* params[] = {&p};
  grad_check([&](bool) { return p.value(0, 0) * p.value(1, 1); }, params);
  EXPECT_EQ(p.value, before);
}

TEST(GradCheck, SignFlipIsFlaggedOnTheCorruptedTensor) {
  Rng rng(2);
  ParamTensor w("w", 3, 4), b("b", 3, 1);
  for (double& v : w.value.flat()) v = rng.normal();
  for (double& v : b.value.flat()) v = rng.normal();
  const Vec x{0.1, -0.4, 0.8, 0.3};
  ParamTensor* params[] = {&w, &b};
  const LossFn loss = [&](bool with_grad) {
    const Vec y = dense_tanh(w, b, x);
    double s = 0.0;
    for (double v : y) s += v;
    if (with_grad) {
      dense_tanh_backward(w, b, x, y, Vec(3, 1.0), {});
      for (double& g : b.grad.flat()) g = -g;  // corrupted backward
    }
    return s;
  };
  const auto report = grad_check(loss, params);
  EXPECT_FALSE(report.passed);
  EXPECT_TRUE(report.find("w")->passed);
  EXPECT_FALSE(report.find("b")->passed);
}

TEST(GradCheck, ExpectedScaleAccountsForReversal) {
  ParamTensor p("p", 1, 1);
  p.value(0, 0) = 0.7;
  ParamTensor* params[] = {&p};
  const LossFn loss = [&](bool with_grad) {
    if (with_grad) p.grad(0, 0) += -0.01 * 2 * p.value(0, 0);
    return p.value(0, 0) * p.value(0, 0);
  };
  EXPECT_FALSE(grad_check(loss, params).passed);
  GradCheckOptions options;
  options.expected_scale["p"] = -0.01;
  EXPECT_TRUE(grad_check(loss, params, options).passed);
}

}  // namespace
}  // namespace cfd

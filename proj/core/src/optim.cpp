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

#include "cfd/optim.hpp"

#include <cmath>

#include "cfd/error.hpp"

namespace cfd {

void adam_step(ParamTensor& param, double lr, const AdamConfig& config) {
  const auto g = param.grad.flat();
  for (double x : g) {
    if (!std::isfinite(x)) {
      fail(ErrorCode::kNonFiniteGradient, "non-finite gradient in tensor '" + param.name + "'");
    }
  }
  ++param.step;
  const double t = static_cast<double>(param.step);
  const double correction1 = 1.0 - std::pow(config.beta1, t);
  const double correction2 = 1.0 - std::pow(config.beta2, t);
  auto w = param.value.flat();
  auto m = param.m.flat();
  auto v = param.v.flat();
  for (std::size_t i = 0; i < w.size(); ++i) {
    m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * g[i];
    v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * g[i] * g[i];
    const double m_hat = m[i] / correction1;
    const double v_hat = v[i] / correction2;
    w[i] -= lr * m_hat / (std::sqrt(v_hat) + config.epsilon);
  }
  param.zero_grad();
}

LrPlateau::LrPlateau(double initial_lr, int patience, double factor)
    : lr_(initial_lr), patience_(patience), factor_(factor) {
  require(initial_lr > 0.0, ErrorCode::kInvalidArgument, "learning rate must be positive");
  require(patience >= 1, ErrorCode::kInvalidArgument, "plateau patience must be >= 1");
}

bool LrPlateau::observe(double metric) {
  if (metric > best_) {
    best_ = metric;
    stale_ = 0;
    return false;
  }
  if (++stale_ >= patience_) {
    lr_ *= factor_;
    stale_ = 0;
    return true;
  }
  return false;
}

}  // namespace cfd

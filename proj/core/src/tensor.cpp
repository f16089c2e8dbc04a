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

#include "cfd/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "cfd/rng.hpp"

namespace cfd {

void Matrix::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

void glorot_uniform(ParamTensor& tensor, Rng& rng) {
  const double fan_in = static_cast<double>(tensor.cols());
  const double fan_out = static_cast<double>(tensor.rows());
  const double limit = std::sqrt(6.0 / (fan_in + fan_out));
  for (double& x : tensor.value.flat()) x = rng.uniform(-limit, limit);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace cfd

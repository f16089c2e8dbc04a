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

#ifndef CFD_GRAD_CHECK_HPP_
#define CFD_GRAD_CHECK_HPP_

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cfd/tensor.hpp"

namespace cfd {

// Evaluates a scalar loss. When `with_grad` is true it must also accumulate
// the analytic gradient into the grad buffers of the checked tensors.
using LossFn = std::function<double(bool with_grad)>;

struct GradCheckOptions {
  double step = 1e-6;
  double tolerance = 1e-5;
  // Entries whose gradient is tiny compared with the tensor's largest
  // finite-difference entry are compared against this fraction of it, so that
  // cancellation noise on near-zero entries does not count as failure.
  double scale_floor = 1e-2;
  double abs_floor = 1e-8;
  // Expected ratio analytic / numeric per tensor name (default 1). A gradient
  // reversal layer, for instance, expects -weight on the tensors behind it.
  std::map<std::string, double> expected_scale;
};

struct GradCheckEntry {
  std::string name;
  std::size_t size = 0;
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
  std::size_t worst_index = 0;
  bool passed = true;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  double tolerance = 0.0;
  bool passed = true;

  double max_rel_error() const;
  const GradCheckEntry* find(const std::string& name) const;
};

// Central finite differences on every entry of every tensor. Tensor values are
// restored exactly afterwards; grad buffers hold the analytic gradient.
GradCheckReport grad_check(const LossFn& loss, std::span<ParamTensor* const> params,
                           const GradCheckOptions& options = {});

}  // namespace cfd

#endif  // CFD_GRAD_CHECK_HPP_

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

#ifndef CFD_CLI_GRADCHECK_SUITE_HPP_
#define CFD_CLI_GRADCHECK_SUITE_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace cfd::cli {

// Names of every registered loss, in report order.
std::vector<std::string> registered_losses();

struct SuiteOptions {
  std::size_t batches = 20;
  std::uint64_t seed = 1;
  double tolerance = 1e-5;
  // Name of a loss whose backward pass is sign-flipped (negative control).
  std::string inject_fault;
};

struct LossCheck {
  std::string name;
  std::size_t batches = 0;
  double max_rel_error = 0.0;
  std::string worst_tensor;
  bool passed = true;
};

struct SuiteReport {
  std::vector<LossCheck> losses;
  double tolerance = 0.0;
  bool passed = true;
};

// Checks each loss on `batches` random toy models and batches (6 samples,
// 3 classes, 3 layers of dim 5, out_dim 4), cycling attention modes and
// shared / per-layer projections across batches.
SuiteReport run_gradcheck_suite(const SuiteOptions& options = {});

}  // namespace cfd::cli

#endif  // CFD_CLI_GRADCHECK_SUITE_HPP_

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

#ifndef CFD_OPTIM_HPP_
#define CFD_OPTIM_HPP_

#include <limits>

#include "cfd/tensor.hpp"

namespace cfd {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// One bias-corrected Adam update in place; zeroes the gradient afterwards.
// Throws NonFiniteGradient naming the tensor if any gradient entry is NaN/Inf.
void adam_step(ParamTensor& param, double lr, const AdamConfig& config = {});

// Halves the learning rate once the monitored metric has not improved for
// `patience` consecutive observations; the counter restarts after each cut.
class LrPlateau {
 public:
  LrPlateau(double initial_lr, int patience, double factor = 0.5);

  // Records one epoch's metric. Returns true if the rate was just cut.
  bool observe(double metric);

  double lr() const { return lr_; }
  int epochs_without_improvement() const { return stale_; }
  double best() const { return best_; }

 private:
  double lr_;
  int patience_;
  double factor_;
  int stale_ = 0;
  double best_ = -std::numeric_limits<double>::infinity();
};

}  // namespace cfd

#endif  // CFD_OPTIM_HPP_

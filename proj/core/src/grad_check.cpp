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

#include "cfd/grad_check.hpp"

#include <algorithm>
#include <cmath>

namespace cfd {

double GradCheckReport::max_rel_error() const {
  double worst = 0.0;
  for (const auto& e : entries) worst = std::max(worst, e.max_rel_error);
  return worst;
}

const GradCheckEntry* GradCheckReport::find(const std::string& name) const {
  for (const auto& e : entries) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

GradCheckReport grad_check(const LossFn& loss, std::span<ParamTensor* const> params,
                           const GradCheckOptions& options) {
  for (ParamTensor* p : params) p->zero_grad();
  loss(true);

  GradCheckReport report;
  report.tolerance = options.tolerance;
  for (ParamTensor* p : params) {
    GradCheckEntry entry;
    entry.name = p->name;
    entry.size = p->size();
    const auto it = options.expected_scale.find(p->name);
    const double scale = it == options.expected_scale.end() ? 1.0 : it->second;

    auto values = p->value.flat();
    const auto analytic = p->grad.flat();
    Vec numeric(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      values[i] = saved + options.step;
      const double up = loss(false);
      values[i] = saved - options.step;
      const double down = loss(false);
      values[i] = saved;
      numeric[i] = scale * (up - down) / (2.0 * options.step);
    }

    double peak = 0.0;
    for (std::size_t i = 0; i < numeric.size(); ++i) {
      peak = std::max({peak, std::abs(numeric[i]), std::abs(analytic[i])});
    }
    const double floor = std::max(options.abs_floor, options.scale_floor * peak);
    for (std::size_t i = 0; i < numeric.size(); ++i) {
      const double diff = std::abs(analytic[i] - numeric[i]);
      const double denom = std::max({std::abs(analytic[i]), std::abs(numeric[i]), floor});
      const double rel = diff / denom;
      if (rel > entry.max_rel_error) {
        entry.max_rel_error = rel;
        entry.worst_index = i;
      }
      entry.max_abs_error = std::max(entry.max_abs_error, diff);
    }
    entry.passed = entry.max_rel_error < options.tolerance;
    report.passed = report.passed && entry.passed;
    report.entries.push_back(std::move(entry));
  }
  return report;
}

}  // namespace cfd

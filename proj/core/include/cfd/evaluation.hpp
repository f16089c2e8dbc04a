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

#ifndef CFD_EVALUATION_HPP_
#define CFD_EVALUATION_HPP_

// Diagnostics over a frozen FAM: accuracy, proxy A-distance, the error of the
// ideal joint hypothesis, and the in-domain distillation test. Every probe is
// a fresh affine softmax classifier on z trained with Adam.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cfd/fam.hpp"
#include "cfd/feature_store.hpp"
#include "cfd/tensor.hpp"

namespace cfd {

// Fraction of labelled records whose argmax prediction matches the label.
double accuracy(const FamParams& params, const Dataset& labeled);

struct ProbeConfig {
  int epochs = 30;
  double lr = 1e-2;
  std::size_t batch_size = 50;
  double train_fraction = 0.8;
  std::uint64_t seed = 7;
  // Held-out diagnostics average this many independent split + probe draws;
  // a single 80/20 split is too noisy to order close models.
  std::size_t repeats = 5;
};

struct LinearProbe {
  ParamTensor w;
  ParamTensor b;

  std::size_t predict(std::span<const double> x) const;
  double error(const Matrix& x, const std::vector<std::size_t>& y) const;
};

LinearProbe train_probe(const Matrix& x, const std::vector<std::size_t>& y,
                        std::size_t n_classes, const ProbeConfig& config);

struct ADistanceResult {
  double domain_error = 0.0;
  double a_distance = 0.0;
};

// Trains a probe to tell source z from target z on a balanced sample and
// returns 2 (1 - 2 delta) clamped to [0, 2], delta being the held-out error
// averaged over the probe repeats.
ADistanceResult a_distance(const FamParams& params, const Dataset& source, const Dataset& target,
                           const ProbeConfig& probe = {});

// Recomputes the distance from a stored domain error.
double a_distance_from_error(double domain_error);

struct JointErrorResult {
  double source_error = 0.0;
  double target_error = 0.0;
  double joint_error = 0.0;
};

// One probe trained on the pooled labelled training splits of both domains;
// reports the sum of its held-out errors on each domain, averaged over the
// probe repeats.
JointErrorResult joint_error(const FamParams& params, const Dataset& source_labeled,
                             const Dataset& target_labeled, const ProbeConfig& probe = {});

struct InDomainConfig {
  FamConfig fam;
  int epochs = 20;
  double lr = 1e-3;
  std::size_t batch_size = 50;
  std::size_t n_negatives = 10;
  std::uint64_t seed = 11;
};

struct InDomainResult {
  double fd_accuracy = 0.0;
  double supervised_accuracy = 0.0;
};

// Path A distils the FAM on every split's features without labels, freezes it
// and fits a probe on the train split. Path B trains FAM and classifier
// together on the train split. Both are scored on the test split.
InDomainResult in_domain_fd_test(const Dataset& train, const Dataset& valid, const Dataset& test,
                                 const InDomainConfig& config, const ProbeConfig& probe = {});

struct SeedStats {
  std::vector<double> values;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation (n - 1)
};

SeedStats summarize(std::vector<double> values);

struct DiagnosticReport {
  std::optional<double> accuracy;
  std::optional<ADistanceResult> adist;
  std::optional<JointErrorResult> joint;
  std::optional<InDomainResult> in_domain;

  nlohmann::ordered_json to_json() const;
};

}  // namespace cfd

#endif  // CFD_EVALUATION_HPP_

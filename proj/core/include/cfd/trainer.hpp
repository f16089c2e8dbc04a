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

#ifndef CFD_TRAINER_HPP_
#define CFD_TRAINER_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cfd/fam.hpp"
#include "cfd/feature_store.hpp"
#include "cfd/objectives.hpp"
#include "cfd/self_training.hpp"

namespace cfd {

enum class Method {
  kSourceOnly,
  kP,
  kPCfd,
  kPC,
  kPFd,
  kCfdOnly,
  kFdOnly,
  kKl,
  kMmd,
  kAdv,
};

std::string_view to_string(Method method);
// Accepts the canonical names (p_cfd, fd_only, ...) and the short spellings
// ("p+CFd", "p+C", "xlmr-10", ...).
Method parse_method(std::string_view name);

// Which loss terms a method switches on in addition to the source
// cross-entropy that every method trains with.
struct MethodTerms {
  bool pseudo_ce = false;
  bool fd = false;
  bool intra_class = false;
  bool kl = false;
  bool mmd = false;
  bool adv = false;

  bool needs_pseudo_labels() const { return pseudo_ce || intra_class; }
  bool needs_target_batch() const { return fd || kl || mmd || adv; }
};

MethodTerms terms_of(Method method);

struct TrainConfig {
  Method method = Method::kPCfd;
  FamConfig fam;
  Schedule schedule;
  double lr = 1e-4;
  std::size_t batch_cls = 50;
  std::size_t batch_mi = 50;
  int max_epochs = 20;
  int warmup_epochs = 1;
  int plateau_patience = 10;
  double lambda = 1.0;
  double kl_weight = 500.0;
  double mmd_weight = 1.0;
  // Gradient-reversal weight of the adversarial baseline.
  double adv_weight = 0.01;
  std::size_t n_negatives = 10;
  bool exclude_self_negatives = false;
  std::uint64_t seed = 1;

  void validate() const;
};

struct EpochRecord {
  int epoch = 0;
  double lr = 0.0;
  double alpha = 0.0;
  std::size_t k_target = 0;
  std::size_t n_pseudo = 0;
  LossReport losses;  // per-step means
  double intra_class = 0.0;
  double valid_accuracy = 0.0;
  std::optional<double> target_accuracy;
};

struct TrainTrace {
  std::vector<EpochRecord> epochs;

  // Column order:
  // epoch,lr,alpha,k_target,n_pseudo,loss_total,L_pred_S,L_pred_T',L_Fd,L_C,
  // KL,MMD,Adv,L_intra_class,valid_acc,target_acc
  // Inactive loss terms and a missing target accuracy are left empty.
  std::string to_csv() const;
};

struct TrainResult {
  FamParams params;
  TrainTrace trace;
};

// Runs the full recipe. Per epoch: refresh pseudo labels (after warm-up),
// freeze class centers over source_train + pseudo set, take
// ceil(|source_train| / batch_cls) joint Adam steps, evaluate, and apply the
// validation plateau rule.
TrainResult train(const TrainConfig& config, const ExperimentData& data);
TrainResult train(const TrainConfig& config, const Manifest& manifest);

struct Predictions {
  std::vector<std::size_t> labels;
  Matrix probs;  // [n_records x n_classes]
};

Predictions predict(const FamParams& params, const Dataset& dataset);

}  // namespace cfd

#endif  // CFD_TRAINER_HPP_

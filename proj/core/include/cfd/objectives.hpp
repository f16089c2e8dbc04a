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

#ifndef CFD_OBJECTIVES_HPP_
#define CFD_OBJECTIVES_HPP_

// Loss terms. Every model-level loss takes a `grad_scale`: when non-zero the
// gradient of grad_scale * loss is accumulated into the parameter buffers.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cfd/fam.hpp"
#include "cfd/feature_store.hpp"
#include "cfd/tensor.hpp"

namespace cfd {

class Rng;

// A record paired with a (true or pseudo) class label.
struct LabeledExample {
  FeatureRecord record;
  std::size_t label = 0;
};

// Labelled view of every record in a dataset that carries a label.
std::vector<LabeledExample> labeled_examples(const Dataset& dataset);

struct ClassifierPass {
  FamOutput fam;
  Vec logits;
  Vec probs;
};

ClassifierPass classifier_forward(const FamParams& params, const FeatureRecord& record);
void classifier_backward(FamParams& params, const ClassifierPass& pass,
                         std::span<const double> dlogits);

// Mean cross-entropy of the task classifier.
double source_ce(FamParams& params, std::span<const LabeledExample> batch,
                 double grad_scale = 0.0);

// alpha * mean cross-entropy over pseudo-labelled examples; 0 when empty.
double pseudo_ce(FamParams& params, std::span<const LabeledExample> batch, double alpha,
                 double grad_scale = 0.0);

// Prediction entropy -sum p log p of one record.
double entropy_score(const FamParams& params, const FeatureRecord& record);

// Mean prediction entropy over a batch (differentiable form of entropy_score).
double entropy_loss(FamParams& params, std::span<const FeatureRecord> batch,
                    double grad_scale = 0.0);

// Sum of the uppermost n layer rows.
Vec sum_last_n(const FeatureRecord& record, std::size_t n);

// n_neg shuffles of a batch: index(i, k) is the negative partner of sample i
// in draw k. Each draw is a uniform permutation; with exclude_self the draw is
// repeated until it has no fixed point.
class NegativeSet {
 public:
  NegativeSet() = default;
  NegativeSet(std::size_t batch_size, std::vector<std::vector<std::size_t>> draws);

  std::size_t batch_size() const { return batch_size_; }
  std::size_t n_negatives() const { return draws_.size(); }
  std::size_t index(std::size_t i, std::size_t k) const { return draws_[k][i]; }
  const std::vector<std::size_t>& draw(std::size_t k) const { return draws_[k]; }

 private:
  std::size_t batch_size_ = 0;
  std::vector<std::vector<std::size_t>> draws_;
};

NegativeSet sample_negatives(std::size_t batch_size, std::size_t n_neg, Rng& rng,
                             bool exclude_self = false);

struct NceStats {
  double loss = 0.0;
  double mean_positive = 0.0;
  double mean_negative = 0.0;
};

// Feature self-distillation: for sample i with critic output q_i = critic(z_i),
//   J_i = cos(q_i, xbar_i) - (1/K) sum_k cos(q_i, xbar_neg(i,k))
// and the loss is -mean_i J_i. xbar sums the FAM's window of raw layers.
NceStats nce_fd_loss(FamParams& params, std::span<const FeatureRecord> batch,
                     const NegativeSet& negatives, double grad_scale = 0.0);

struct ClassCenters {
  Matrix centers;                   // [n_classes x out_dim]
  std::vector<std::size_t> counts;  // 0 marks an absent class
  int epoch_stamp = 0;

  bool present(std::size_t c) const { return c < counts.size() && counts[c] > 0; }
};

// Per-class mean of z over the members, computed without gradient.
ClassCenters class_centers(const FamParams& params, std::span<const LabeledExample> members,
                           int epoch_stamp = 0);

// sum_i |z_i - center(label_i)|_2; centers are constants.
double intra_class_loss(FamParams& params, std::span<const LabeledExample> members,
                        const ClassCenters& centers, double grad_scale = 0.0);

struct LossComponent {
  std::string name;
  double value = 0.0;
  double weight = 1.0;
};

struct LossReport {
  double total = 0.0;
  std::vector<LossComponent> components;

  void add(std::string name, double value, double weight = 1.0);
  double get(const std::string& name) const;  // 0 if absent
  bool has(const std::string& name) const;
};

inline constexpr const char* kLossSource = "L_pred_S";
inline constexpr const char* kLossPseudo = "L_pred_T'";
inline constexpr const char* kLossFd = "L_Fd";
inline constexpr const char* kLossIntra = "L_C";
inline constexpr const char* kLossKl = "KL";
inline constexpr const char* kLossMmd = "MMD";
inline constexpr const char* kLossAdv = "Adv";

// L_Fd(target) + lambda * L_C, where inside the objective L_C is the per-member
// mean of intra_class_loss so that both terms are batch means.
LossReport cfd_loss(FamParams& params, std::span<const FeatureRecord> target_batch,
                    std::span<const LabeledExample> members, const ClassCenters& centers,
                    const NegativeSet& negatives, double lambda, double grad_scale = 0.0);

// Symmetric KL between softmax(mean z_s) and softmax(mean z_t). When the
// output matrices are non-null they receive dKL/dz per row.
double kl_divergence_sym(const Matrix& zs, const Matrix& zt, Matrix* dzs, Matrix* dzt);

inline constexpr double kMmdBandwidthFactors[5] = {0.25, 0.5, 1.0, 2.0, 4.0};

// Biased multi-kernel MMD^2 with Gaussian kernels exp(-d^2 / (2 sigma^2)),
// sigma = median pairwise distance of the pooled batch times each factor.
// The gradient includes the dependence of the median on the samples.
double mmd2_multi_kernel(const Matrix& zs, const Matrix& zt, Matrix* dzs, Matrix* dzt);

double kl_baseline(FamParams& params, std::span<const FeatureRecord> source,
                   std::span<const FeatureRecord> target, double grad_scale = 0.0);

double mmd_baseline(FamParams& params, std::span<const FeatureRecord> source,
                    std::span<const FeatureRecord> target, double grad_scale = 0.0);

// Domain-classifier cross-entropy (source = 0, target = 1) over the mixed
// batch. The domain classifier receives the ordinary gradient; the gradient
// sent into z is multiplied by -reversal_weight.
double adv_baseline(FamParams& params, std::span<const FeatureRecord> source,
                    std::span<const FeatureRecord> target, double reversal_weight,
                    double grad_scale = 0.0);

// Stack the FAM outputs of a batch row by row (no gradient).
Matrix embed(const FamParams& params, std::span<const FeatureRecord> batch);

}  // namespace cfd

#endif  // CFD_OBJECTIVES_HPP_

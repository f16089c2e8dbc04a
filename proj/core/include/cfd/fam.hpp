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

#ifndef CFD_FAM_HPP_
#define CFD_FAM_HPP_

// Feature adaptation module: a tanh projection applied to each of the last N
// pooled encoder layers, followed by temperature-sharpened attention pooling.
//
//   z_l   = tanh(W h_l + b)
//   s_l   = tanh(w_att . z_l)
//   a_l   = exp(s_l) / sum_j exp(s_j)
//   alpha = a^(1/tau) / sum_j a_j^(1/tau)   ( == softmax(s / tau) )
//   z     = sum_l alpha_l z_l

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cfd/feature_store.hpp"
#include "cfd/tensor.hpp"

namespace cfd {

class Rng;

enum class AttentionMode { kAtt, kAve, kOneLayer };

std::string_view to_string(AttentionMode mode);
AttentionMode parse_attention_mode(std::string_view name);

struct FamConfig {
  std::size_t n_layers_used = 4;
  std::size_t in_dim = 0;
  std::size_t out_dim = 16;
  double tau = 0.3;
  AttentionMode attention_mode = AttentionMode::kAtt;
  bool per_layer_projection = false;

  // Number of layers actually fed through the module.
  std::size_t window() const {
    return attention_mode == AttentionMode::kOneLayer ? 1 : n_layers_used;
  }
  void validate(std::size_t available_layers) const;
};

// Every trainable tensor of the model: the FAM itself, the critic projection
// used by feature distillation, the task classifier and the domain classifier.
struct FamParams {
  FamConfig config;
  std::size_t n_classes = 0;

  std::vector<ParamTensor> proj_w;  // one entry, or one per layer
  std::vector<ParamTensor> proj_b;
  ParamTensor att_w;                // [1 x out_dim]
  ParamTensor critic_w;             // [in_dim x out_dim]
  ParamTensor critic_b;             // [in_dim x 1]
  ParamTensor cls_w;                // [n_classes x out_dim]
  ParamTensor cls_b;
  ParamTensor dom_w;                // [2 x out_dim]
  ParamTensor dom_b;

  static FamParams init(const FamConfig& config, std::size_t n_classes, Rng& rng);

  std::vector<ParamTensor*> tensors();
  std::vector<const ParamTensor*> tensors() const;
  std::vector<ParamTensor*> fam_tensors();
  ParamTensor* find(std::string_view name);
  void zero_grad();
};

struct FamOutput {
  Vec z;
  Vec alphas;
  Matrix z_layers;  // [N x out_dim]
  Vec scores;       // tanh(w_att . z_l), before softmax
  Matrix inputs;    // [N x in_dim] selected h_l rows
};

// z_l = tanh(W h_l + b).
Vec project_layer(const ParamTensor& w, const ParamTensor& b, std::span<const double> h_bar);

// Raw weights a_l = softmax(tanh(w_att . z_l)).
Vec raw_attention(const ParamTensor& att_w, const Matrix& z_layers);

// a^(1/tau) renormalised.
Vec sharpen(std::span<const double> weights, double tau);

FamOutput attend(const ParamTensor& att_w, Matrix z_layers, double tau,
                 AttentionMode mode = AttentionMode::kAtt);

// Runs the module over the record's uppermost `config.window()` layers.
FamOutput fam_forward(const FamParams& params, const FeatureRecord& record);

// Accumulates gradients of the FAM tensors given dL/dz.
void fam_backward(FamParams& params, const FamOutput& out, std::span<const double> dz);

}  // namespace cfd

#endif  // CFD_FAM_HPP_

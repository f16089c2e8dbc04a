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

#include "cfd/fam.hpp"

#include <cmath>
#include <string>

#include "cfd/error.hpp"
#include "cfd/ops.hpp"
#include "cfd/rng.hpp"

namespace cfd {

std::string_view to_string(AttentionMode mode) {
  switch (mode) {
    case AttentionMode::kAtt: return "att";
    case AttentionMode::kAve: return "ave";
    case AttentionMode::kOneLayer: return "one_layer";
  }
  return "att";
}

AttentionMode parse_attention_mode(std::string_view name) {
  if (name == "att") return AttentionMode::kAtt;
  if (name == "ave") return AttentionMode::kAve;
  if (name == "one_layer") return AttentionMode::kOneLayer;
  fail(ErrorCode::kConfig, "unknown attention_mode '" + std::string(name) + "'");
}

void FamConfig::validate(std::size_t available_layers) const {
  require(n_layers_used >= 1, ErrorCode::kConfig, "n_layers_used must be >= 1");
  require(n_layers_used <= available_layers, ErrorCode::kShapeMismatch,
          "n_layers_used = " + std::to_string(n_layers_used) + " but records have only " +
              std::to_string(available_layers) + " layers");
  require(in_dim > 0 && out_dim > 0, ErrorCode::kConfig, "in_dim and out_dim must be positive");
  require(tau > 0.0, ErrorCode::kConfig, "tau must be positive");
}

FamParams FamParams::init(const FamConfig& config, std::size_t n_classes, Rng& rng) {
  require(config.in_dim > 0 && config.out_dim > 0, ErrorCode::kConfig,
          "FAM dimensions must be positive");
  require(n_classes >= 2, ErrorCode::kConfig, "need at least two classes");
  FamParams p;
  p.config = config;
  p.n_classes = n_classes;
  const std::size_t in = config.in_dim;
  const std::size_t out = config.out_dim;
  const std::size_t n_proj = config.per_layer_projection ? config.window() : 1;
  for (std::size_t l = 0; l < n_proj; ++l) {
    const std::string suffix = config.per_layer_projection ? "." + std::to_string(l) : "";
    p.proj_w.emplace_back("fam.proj.w" + suffix, out, in);
    p.proj_b.emplace_back("fam.proj.b" + suffix, out, 1);
    glorot_uniform(p.proj_w.back(), rng);
  }
  p.att_w = ParamTensor("fam.att.w", 1, out);
  glorot_uniform(p.att_w, rng);
  p.critic_w = ParamTensor("critic.w", in, out);
  p.critic_b = ParamTensor("critic.b", in, 1);
  glorot_uniform(p.critic_w, rng);
  p.cls_w = ParamTensor("cls.w", n_classes, out);
  p.cls_b = ParamTensor("cls.b", n_classes, 1);
  glorot_uniform(p.cls_w, rng);
  p.dom_w = ParamTensor("dom.w", 2, out);
  p.dom_b = ParamTensor("dom.b", 2, 1);
  glorot_uniform(p.dom_w, rng);
  return p;
}

std::vector<ParamTensor*> FamParams::fam_tensors() {
  std::vector<ParamTensor*> out;
  for (auto& w : proj_w) out.push_back(&w);
  for (auto& b : proj_b) out.push_back(&b);
  out.push_back(&att_w);
  return out;
}

std::vector<ParamTensor*> FamParams::tensors() {
  auto out = fam_tensors();
  for (ParamTensor* t : {&critic_w, &critic_b, &cls_w, &cls_b, &dom_w, &dom_b}) out.push_back(t);
  return out;
}

std::vector<const ParamTensor*> FamParams::tensors() const {
  auto mutable_list = const_cast<FamParams*>(this)->tensors();
  return {mutable_list.begin(), mutable_list.end()};
}

ParamTensor* FamParams::find(std::string_view name) {
  for (ParamTensor* t : tensors()) {
    if (t->name == name) return t;
  }
  return nullptr;
}

void FamParams::zero_grad() {
  for (ParamTensor* t : tensors()) t->zero_grad();
}

Vec project_layer(const ParamTensor& w, const ParamTensor& b, std::span<const double> h_bar) {
  return dense_tanh(w, b, h_bar);
}

Vec raw_attention(const ParamTensor& att_w, const Matrix& z_layers) {
  Vec s(z_layers.rows());
  for (std::size_t l = 0; l < s.size(); ++l) s[l] = std::tanh(dot(att_w.value.row(0), z_layers.row(l)));
  return softmax(s);
}

Vec sharpen(std::span<const double> weights, double tau) {
  Vec out(weights.size());
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    out[i] = std::pow(weights[i], 1.0 / tau);
    total += out[i];
  }
  for (double& v : out) v /= total;
  return out;
}

FamOutput attend(const ParamTensor& att_w, Matrix z_layers, double tau, AttentionMode mode) {
  const std::size_t n = z_layers.rows();
  require(n >= 1, ErrorCode::kShapeMismatch, "attend: no layers");
  require(att_w.cols() == z_layers.cols(), ErrorCode::kShapeMismatch,
          "attend: attention vector width differs from projected width");
  require(tau > 0.0, ErrorCode::kInvalidArgument, "attend: tau must be positive");
  FamOutput out;
  out.scores.resize(n);
  for (std::size_t l = 0; l < n; ++l) {
    out.scores[l] = std::tanh(dot(att_w.value.row(0), z_layers.row(l)));
  }
  if (mode == AttentionMode::kAtt) {
    // (softmax(s))^(1/tau) renormalised is exactly softmax(s / tau).
    Vec scaled(n);
    for (std::size_t l = 0; l < n; ++l) scaled[l] = out.scores[l] / tau;
    out.alphas = softmax(scaled);
  } else {
    out.alphas.assign(n, 1.0 / static_cast<double>(n));
  }
  out.z.assign(z_layers.cols(), 0.0);
  for (std::size_t l = 0; l < n; ++l) {
    const auto row = z_layers.row(l);
    for (std::size_t d = 0; d < row.size(); ++d) out.z[d] += out.alphas[l] * row[d];
  }
  out.z_layers = std::move(z_layers);
  return out;
}

FamOutput fam_forward(const FamParams& params, const FeatureRecord& record) {
  const FamConfig& cfg = params.config;
  const std::size_t window = cfg.window();
  require(record.n_layers >= window, ErrorCode::kShapeMismatch,
          "record has " + std::to_string(record.n_layers) + " layers, FAM needs " +
              std::to_string(window));
  require(record.dim == cfg.in_dim, ErrorCode::kShapeMismatch,
          "record dim " + std::to_string(record.dim) + " differs from FAM in_dim " +
              std::to_string(cfg.in_dim));
  const std::size_t first = record.n_layers - window;
  Matrix inputs(window, cfg.in_dim);
  Matrix z_layers(window, cfg.out_dim);
  for (std::size_t l = 0; l < window; ++l) {
    const auto src = record.layer(first + l);
    auto dst = inputs.row(l);
    for (std::size_t d = 0; d < cfg.in_dim; ++d) dst[d] = src[d];
    const std::size_t k = params.proj_w.size() == 1 ? 0 : l;
    dense_tanh(params.proj_w[k], params.proj_b[k], inputs.row(l), z_layers.row(l));
  }
  FamOutput out = attend(params.att_w, std::move(z_layers), cfg.tau, cfg.attention_mode);
  out.inputs = std::move(inputs);
  return out;
}

void fam_backward(FamParams& params, const FamOutput& out, std::span<const double> dz) {
  const std::size_t n = out.z_layers.rows();
  const std::size_t width = out.z_layers.cols();
  Matrix dz_layers(n, width);
  for (std::size_t l = 0; l < n; ++l) {
    auto row = dz_layers.row(l);
    for (std::size_t d = 0; d < width; ++d) row[d] = out.alphas[l] * dz[d];
  }
  if (params.config.attention_mode == AttentionMode::kAtt) {
    // dalpha_l = dz . z_l; through softmax(s / tau); through tanh.
    Vec dalpha(n);
    for (std::size_t l = 0; l < n; ++l) dalpha[l] = dot(dz, out.z_layers.row(l));
    const double inner = dot(out.alphas, dalpha);
    auto att = params.att_w.value.row(0);
    auto datt = params.att_w.grad.row(0);
    for (std::size_t l = 0; l < n; ++l) {
      const double ds = out.alphas[l] * (dalpha[l] - inner) / params.config.tau;
      const double du = ds * (1.0 - out.scores[l] * out.scores[l]);
      if (du == 0.0) continue;
      const auto zl = out.z_layers.row(l);
      auto dzl = dz_layers.row(l);
      for (std::size_t d = 0; d < width; ++d) {
        datt[d] += du * zl[d];
        dzl[d] += du * att[d];
      }
    }
  }
  for (std::size_t l = 0; l < n; ++l) {
    const std::size_t k = params.proj_w.size() == 1 ? 0 : l;
    dense_tanh_backward(params.proj_w[k], params.proj_b[k], out.inputs.row(l),
                        out.z_layers.row(l), dz_layers.row(l), {});
  }
}

}  // namespace cfd

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

#include "cfd/ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cfd/error.hpp"

namespace cfd {

namespace {

void check_affine_shapes(const ParamTensor& w, const ParamTensor& b, std::size_t in,
                         std::size_t out) {
  if (w.cols() != in || w.rows() != out || b.size() != out) {
    fail(ErrorCode::kShapeMismatch,
         "affine '" + w.name + "': weight is " + std::to_string(w.rows()) + "x" +
             std::to_string(w.cols()) + ", input " + std::to_string(in) + ", output " +
             std::to_string(out));
  }
}

}  // namespace

void affine(const ParamTensor& w, const ParamTensor& b, std::span<const double> x,
            std::span<double> y) {
  check_affine_shapes(w, b, x.size(), y.size());
  const auto bias = b.value.flat();
  for (std::size_t r = 0; r < y.size(); ++r) y[r] = bias[r] + dot(w.value.row(r), x);
}

void affine_backward(ParamTensor& w, ParamTensor& b, std::span<const double> x,
                     std::span<const double> dy, std::span<double> dx) {
  check_affine_shapes(w, b, x.size(), dy.size());
  auto db = b.grad.flat();
  for (std::size_t r = 0; r < dy.size(); ++r) {
    const double g = dy[r];
    if (g == 0.0) continue;
    db[r] += g;
    auto dw = w.grad.row(r);
    for (std::size_t c = 0; c < x.size(); ++c) dw[c] += g * x[c];
    if (!dx.empty()) {
      const auto wr = w.value.row(r);
      for (std::size_t c = 0; c < x.size(); ++c) dx[c] += g * wr[c];
    }
  }
}

void dense_tanh(const ParamTensor& w, const ParamTensor& b, std::span<const double> x,
                std::span<double> y) {
  affine(w, b, x, y);
  for (double& v : y) v = std::tanh(v);
}

Vec dense_tanh(const ParamTensor& w, const ParamTensor& b, std::span<const double> x) {
  Vec y(w.rows());
  dense_tanh(w, b, x, y);
  return y;
}

void dense_tanh_backward(ParamTensor& w, ParamTensor& b, std::span<const double> x,
                         std::span<const double> y, std::span<const double> dy,
                         std::span<double> dx) {
  Vec dpre(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) dpre[i] = dy[i] * (1.0 - y[i] * y[i]);
  affine_backward(w, b, x, dpre, dx);
}

Vec softmax(std::span<const double> logits) {
  require(!logits.empty(), ErrorCode::kInvalidArgument, "softmax: empty input");
  const double shift = *std::max_element(logits.begin(), logits.end());
  Vec p(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - shift);
    total += p[i];
  }
  for (double& v : p) v /= total;
  return p;
}

void softmax_backward(std::span<const double> probs, std::span<const double> dprobs,
                      std::span<double> dlogits) {
  const double inner = dot(probs, dprobs);
  for (std::size_t i = 0; i < probs.size(); ++i) dlogits[i] += probs[i] * (dprobs[i] - inner);
}

double cross_entropy(std::span<const double> probs, std::size_t label) {
  require(label < probs.size(), ErrorCode::kBadLabel,
          "cross_entropy: label " + std::to_string(label) + " out of range");
  return -std::log(std::max(probs[label], kLogClamp));
}

void cross_entropy_backward(std::span<const double> probs, std::size_t label, double scale,
                            std::span<double> dlogits) {
  for (std::size_t i = 0; i < probs.size(); ++i) dlogits[i] += scale * probs[i];
  dlogits[label] -= scale;
}

double entropy(std::span<const double> probs) {
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

void entropy_backward(std::span<const double> probs, double scale, std::span<double> dlogits) {
  // dH/dl_j = -p_j (log p_j + H)
  const double h = entropy(probs);
  for (std::size_t j = 0; j < probs.size(); ++j) {
    if (probs[j] <= 0.0) continue;
    dlogits[j] -= scale * probs[j] * (std::log(probs[j]) + h);
  }
}

double cosine_sim(std::span<const double> a, std::span<const double> b) {
  const double na = norm2(a);
  const double nb = norm2(b);
  if (na == 0.0 || nb == 0.0) fail(ErrorCode::kZeroVector, "cosine_sim: zero-norm input");
  return dot(a, b) / (na * nb);
}

void cosine_sim_backward(std::span<const double> a, std::span<const double> b, double scale,
                         std::span<double> da) {
  const double na = norm2(a);
  const double nb = norm2(b);
  if (na == 0.0 || nb == 0.0) fail(ErrorCode::kZeroVector, "cosine_sim: zero-norm input");
  const double c = dot(a, b) / (na * nb);
  const double inv = 1.0 / (na * nb);
  const double self = c / (na * na);
  for (std::size_t i = 0; i < a.size(); ++i) da[i] += scale * (b[i] * inv - a[i] * self);
}

}  // namespace cfd

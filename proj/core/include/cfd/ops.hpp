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

#ifndef CFD_OPS_HPP_
#define CFD_OPS_HPP_

#include <cstddef>
#include <span>

#include "cfd/tensor.hpp"

namespace cfd {

// Probabilities below this are clamped before taking logs.
inline constexpr double kLogClamp = 1e-12;

// y = W x + b.
void affine(const ParamTensor& w, const ParamTensor& b, std::span<const double> x,
            std::span<double> y);

// Accumulates dW += dy x^T, db += dy and, when dx is non-empty, dx += W^T dy.
void affine_backward(ParamTensor& w, ParamTensor& b, std::span<const double> x,
                     std::span<const double> dy, std::span<double> dx);

// y = tanh(W x + b).
void dense_tanh(const ParamTensor& w, const ParamTensor& b, std::span<const double> x,
                std::span<double> y);
Vec dense_tanh(const ParamTensor& w, const ParamTensor& b, std::span<const double> x);

// Backward through dense_tanh given its output y. dx is optional (+=).
void dense_tanh_backward(ParamTensor& w, ParamTensor& b, std::span<const double> x,
                         std::span<const double> y, std::span<const double> dy,
                         std::span<double> dx);

// Max-shifted softmax. Throws on empty input.
Vec softmax(std::span<const double> logits);

// dlogits += J_softmax^T dprobs.
void softmax_backward(std::span<const double> probs, std::span<const double> dprobs,
                      std::span<double> dlogits);

// -log(max(probs[label], kLogClamp)).
double cross_entropy(std::span<const double> probs, std::size_t label);

// dlogits += scale * (probs - onehot(label)).
void cross_entropy_backward(std::span<const double> probs, std::size_t label, double scale,
                            std::span<double> dlogits);

// Shannon entropy -sum p log p of a distribution.
double entropy(std::span<const double> probs);

// dlogits += scale * dH/dlogits, where H = entropy(softmax(logits)).
void entropy_backward(std::span<const double> probs, double scale, std::span<double> dlogits);

// a.b / (|a| |b|). Throws ZeroVector if either norm is zero.
double cosine_sim(std::span<const double> a, std::span<const double> b);

// da += scale * d cos(a, b) / da.
void cosine_sim_backward(std::span<const double> a, std::span<const double> b, double scale,
                         std::span<double> da);

}  // namespace cfd

#endif  // CFD_OPS_HPP_

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

#ifndef CFD_DATAGEN_HPP_
#define CFD_DATAGEN_HPP_

// Synthetic domain-shifted multi-layer features.
//
// Class means mu_c are orthogonal directions scaled so that every pair sits
// class_sep apart (random unit directions when n_classes > dim). A latent
// x ~ N(m_c, I) is drawn per example, with m_c = mu_c for the source and
// m_c = R mu_c + t for the target; layer l of the record is x + N(0, s_l^2 I)
// with s_l = layer_noise_profile[l].
//
// R = Cayley(theta * A) for a seeded skew-symmetric A with unit spectral
// scale, theta = rotation_per_shift * domain_shift, and t is a seeded unit
// direction times translation_per_shift * domain_shift. domain_shift = 0 gives
// R = I and t = 0.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "cfd/feature_store.hpp"
#include "cfd/tensor.hpp"

namespace cfd {

struct SynthConfig {
  std::size_t n_classes = 3;
  std::size_t n_layers = 4;
  std::size_t dim = 16;
  std::size_t n_source = 900;
  std::size_t n_target = 900;
  double class_sep = 6.0;
  double domain_shift = 2.0;
  std::vector<double> layer_noise_profile = {1.5, 1.0, 0.5, 0.25};
  std::uint64_t seed = 1;
  // Fraction of the source sample held out as source_valid.
  double valid_fraction = 1.0 / 6.0;
  double rotation_per_shift = 0.6;
  double translation_per_shift = 2.0;

  void validate() const;
};

// The generative model behind a config, for oracles and diagnostics.
struct SynthModel {
  Matrix source_means;  // [n_classes x dim]
  Matrix target_means;  // [n_classes x dim]
  Matrix rotation;      // [dim x dim]
  Vec translation;
  std::vector<double> layer_noise;
};

struct SynthData {
  Dataset source_train;
  Dataset source_valid;
  Dataset target_unlabeled;
  Dataset target_test;
};

SynthModel synth_model(const SynthConfig& config);
SynthData generate(const SynthConfig& config);

}  // namespace cfd

#endif  // CFD_DATAGEN_HPP_

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

#include "cfd/datagen.hpp"

#include <cmath>
#include <string>

#include "cfd/error.hpp"
#include "cfd/rng.hpp"

namespace cfd {

namespace {

// Stream ids for Rng::fork; fixed so outputs never depend on call order.
enum Stream : std::uint64_t {
  kStreamMeans = 1,
  kStreamRotation = 2,
  kStreamTranslation = 3,
  kStreamSource = 4,
  kStreamTarget = 5,
  kStreamTargetTest = 6,
};

// Solves A X = B in place (A overwritten) by Gauss-Jordan with partial pivoting.
Matrix solve(Matrix a, Matrix b) {
  const std::size_t n = a.rows();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
    }
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a(col, c), a(pivot, c));
      for (std::size_t c = 0; c < b.cols(); ++c) std::swap(b(col, c), b(pivot, c));
    }
    const double inv = 1.0 / a(col, col);
    for (std::size_t c = 0; c < n; ++c) a(col, c) *= inv;
    for (std::size_t c = 0; c < b.cols(); ++c) b(col, c) *= inv;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a(r, col) == 0.0) continue;
      const double f = a(r, col);
      for (std::size_t c = 0; c < n; ++c) a(r, c) -= f * a(col, c);
      for (std::size_t c = 0; c < b.cols(); ++c) b(r, c) -= f * b(col, c);
    }
  }
  return b;
}

Vec gaussian_vector(Rng& rng, std::size_t n) {
  Vec v(n);
  for (double& x : v) x = rng.normal();
  return v;
}

Matrix class_means(const SynthConfig& cfg) {
  Rng rng = Rng(cfg.seed).fork(kStreamMeans);
  const double radius = cfg.class_sep / std::sqrt(2.0);
  Matrix means(cfg.n_classes, cfg.dim);
  std::vector<Vec> basis;
  for (std::size_t c = 0; c < cfg.n_classes; ++c) {
    Vec v = gaussian_vector(rng, cfg.dim);
    if (cfg.n_classes <= cfg.dim) {
      for (const Vec& u : basis) {
        const double p = dot(v, u);
        for (std::size_t d = 0; d < cfg.dim; ++d) v[d] -= p * u[d];
      }
    }
    const double n = norm2(v);
    for (double& x : v) x /= n;
    basis.push_back(v);
    for (std::size_t d = 0; d < cfg.dim; ++d) means(c, d) = radius * v[d];
  }
  return means;
}

Matrix rotation(const SynthConfig& cfg) {
  const std::size_t n = cfg.dim;
  Rng rng = Rng(cfg.seed).fork(kStreamRotation);
  Matrix g(n, n);
  for (double& x : g.flat()) x = rng.normal();
  // Skew-symmetric generator scaled so its entries have unit-order effect.
  Matrix s(n, n);
  const double scale = cfg.rotation_per_shift * cfg.domain_shift / std::sqrt(2.0 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) s(i, j) = 0.5 * (g(i, j) - g(j, i)) * scale;
  }
  // Cayley transform R = (I - S)^-1 (I + S) is orthogonal for skew S.
  Matrix lhs(n, n), rhs(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double id = i == j ? 1.0 : 0.0;
      lhs(i, j) = id - s(i, j);
      rhs(i, j) = id + s(i, j);
    }
  }
  return solve(std::move(lhs), std::move(rhs));
}

struct Draws {
  std::vector<float> values;
  std::vector<std::int32_t> labels;
};

Draws draw(const SynthConfig& cfg, const Matrix& means, std::size_t count, Rng rng) {
  Draws out;
  out.values.reserve(count * cfg.n_layers * cfg.dim);
  out.labels.resize(count);
  for (std::size_t i = 0; i < count; ++i) out.labels[i] = static_cast<std::int32_t>(i % cfg.n_classes);
  const auto order = rng.permutation(count);
  std::vector<std::int32_t> shuffled(count);
  for (std::size_t i = 0; i < count; ++i) shuffled[i] = out.labels[order[i]];
  out.labels = std::move(shuffled);

  Vec latent(cfg.dim);
  for (std::size_t i = 0; i < count; ++i) {
    const auto mean = means.row(static_cast<std::size_t>(out.labels[i]));
    for (std::size_t d = 0; d < cfg.dim; ++d) latent[d] = mean[d] + rng.normal();
    for (std::size_t l = 0; l < cfg.n_layers; ++l) {
      const double sigma = cfg.layer_noise_profile[l];
      for (std::size_t d = 0; d < cfg.dim; ++d) {
        const double noise = sigma > 0.0 ? sigma * rng.normal() : 0.0;
        out.values.push_back(static_cast<float>(latent[d] + noise));
      }
    }
  }
  return out;
}

}  // namespace

void SynthConfig::validate() const {
  require(n_classes >= 2, ErrorCode::kConfig, "synth: n_classes must be >= 2");
  require(n_layers >= 1 && dim >= 1, ErrorCode::kConfig, "synth: n_layers and dim must be >= 1");
  require(n_source >= 2 && n_target >= 1, ErrorCode::kConfig, "synth: zero samples requested");
  require(class_sep > 0.0, ErrorCode::kConfig, "synth: class_sep must be positive");
  require(domain_shift >= 0.0, ErrorCode::kConfig, "synth: domain_shift must be >= 0");
  require(layer_noise_profile.size() == n_layers, ErrorCode::kConfig,
          "synth: layer_noise_profile has " + std::to_string(layer_noise_profile.size()) +
              " entries for " + std::to_string(n_layers) + " layers");
  for (double s : layer_noise_profile) {
    require(s >= 0.0 && std::isfinite(s), ErrorCode::kConfig, "synth: negative layer noise");
  }
  require(valid_fraction > 0.0 && valid_fraction < 1.0, ErrorCode::kConfig,
          "synth: valid_fraction must be in (0, 1)");
}

SynthModel synth_model(const SynthConfig& config) {
  config.validate();
  SynthModel m;
  m.source_means = class_means(config);
  m.rotation = rotation(config);
  m.translation.assign(config.dim, 0.0);
  if (config.domain_shift > 0.0) {
    Rng rng = Rng(config.seed).fork(kStreamTranslation);
    Vec u = gaussian_vector(rng, config.dim);
    const double n = norm2(u);
    for (std::size_t d = 0; d < config.dim; ++d) {
      m.translation[d] = u[d] / n * config.translation_per_shift * config.domain_shift;
    }
  }
  m.target_means = Matrix(config.n_classes, config.dim);
  for (std::size_t c = 0; c < config.n_classes; ++c) {
    for (std::size_t i = 0; i < config.dim; ++i) {
      double v = m.translation[i];
      for (std::size_t j = 0; j < config.dim; ++j) v += m.rotation(i, j) * m.source_means(c, j);
      m.target_means(c, i) = v;
    }
  }
  m.layer_noise = config.layer_noise_profile;
  return m;
}

SynthData generate(const SynthConfig& config) {
  const SynthModel model = synth_model(config);
  const Rng root(config.seed);

  Draws source = draw(config, model.source_means, config.n_source, root.fork(kStreamSource));
  const auto n_valid = static_cast<std::size_t>(
      std::llround(static_cast<double>(config.n_source) * config.valid_fraction));
  require(n_valid >= 1 && n_valid < config.n_source, ErrorCode::kConfig,
          "synth: source split leaves an empty train or valid set");
  const std::size_t n_train = config.n_source - n_valid;
  const std::size_t stride = config.n_layers * config.dim;

  std::vector<float> train_values(source.values.begin(),
                                  source.values.begin() + static_cast<std::ptrdiff_t>(n_train * stride));
  std::vector<float> valid_values(source.values.begin() + static_cast<std::ptrdiff_t>(n_train * stride),
                                  source.values.end());
  std::vector<std::int32_t> train_labels(source.labels.begin(),
                                         source.labels.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::int32_t> valid_labels(source.labels.begin() + static_cast<std::ptrdiff_t>(n_train),
                                         source.labels.end());

  Draws target = draw(config, model.target_means, config.n_target, root.fork(kStreamTarget));
  Draws test = draw(config, model.target_means, config.n_target, root.fork(kStreamTargetTest));

  SynthData out;
  out.source_train = Dataset::create(config.n_layers, config.dim, config.n_classes,
                                     std::move(train_values), std::move(train_labels),
                                     DatasetRole::kSourceTrain, "synthetic_source");
  out.source_valid = Dataset::create(config.n_layers, config.dim, config.n_classes,
                                     std::move(valid_values), std::move(valid_labels),
                                     DatasetRole::kSourceValid, "synthetic_source");
  out.target_unlabeled = Dataset::create(config.n_layers, config.dim, config.n_classes,
                                         std::move(target.values), {},
                                         DatasetRole::kTargetUnlabeled, "synthetic_target");
  out.target_test = Dataset::create(config.n_layers, config.dim, config.n_classes,
                                    std::move(test.values), std::move(test.labels),
                                    DatasetRole::kTargetTest, "synthetic_target");
  return out;
}

}  // namespace cfd

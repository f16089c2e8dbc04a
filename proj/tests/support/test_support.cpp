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

#include "test_support.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <iterator>
#include <unistd.h>

namespace cfd::testing {

Dataset random_dataset(Rng& rng, std::size_t n, std::size_t n_layers, std::size_t dim,
                       std::size_t n_classes, DatasetRole role, double scale) {
  std::vector<float> values(n * n_layers * dim);
  for (float& v : values) v = static_cast<float>(scale * rng.normal());
  std::vector<std::int32_t> labels;
  if (role_requires_labels(role)) {
    for (std::size_t i = 0; i < n; ++i) labels.push_back(static_cast<std::int32_t>(rng.below(n_classes)));
  }
  return Dataset::create(n_layers, dim, n_classes, std::move(values), std::move(labels), role,
                         "random");
}

FamParams random_params(const FamConfig& config, std::size_t n_classes, Rng& rng, double scale) {
  FamParams p = FamParams::init(config, n_classes, rng);
  for (ParamTensor* t : p.tensors()) {
    for (double& v : t->value.flat()) v = scale * rng.normal();
  }
  return p;
}

std::vector<FeatureRecord> records_of(const Dataset& d) {
  std::vector<FeatureRecord> out;
  for (std::size_t i = 0; i < d.size(); ++i) out.push_back(d.record(i));
  return out;
}

namespace {

// Inverse and log-determinant of a small SPD matrix by Gauss-Jordan.
void invert(std::vector<std::vector<long double>> a, std::vector<std::vector<long double>>& inv,
            long double& logdet) {
  const std::size_t n = a.size();
  inv.assign(n, std::vector<long double>(n, 0.0L));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0L;
  logdet = 0.0L;
  for (std::size_t c = 0; c < n; ++c) {
    const long double pivot = a[c][c];
    logdet += std::log(pivot);
    for (std::size_t j = 0; j < n; ++j) {
      a[c][j] /= pivot;
      inv[c][j] /= pivot;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const long double f = a[r][c];
      for (std::size_t j = 0; j < n; ++j) {
        a[r][j] -= f * a[c][j];
        inv[r][j] -= f * inv[c][j];
      }
    }
  }
}

}  // namespace

double bayes_accuracy(const SynthModel& model, const Matrix& class_means, const Dataset& data) {
  const std::size_t L = data.n_layers();
  const std::size_t D = data.dim();
  const std::size_t C = class_means.rows();
  std::vector<std::vector<long double>> cov(L, std::vector<long double>(L, 1.0L));
  for (std::size_t l = 0; l < L; ++l) cov[l][l] += model.layer_noise[l] * model.layer_noise[l];
  std::vector<std::vector<long double>> prec;
  long double logdet = 0.0L;
  invert(cov, prec, logdet);

  std::size_t correct = 0;
  std::vector<long double> r(L);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const FeatureRecord rec = data.record(i);
    std::size_t best = 0;
    long double best_ll = -INFINITY;
    for (std::size_t c = 0; c < C; ++c) {
      long double ll = 0.0L;
      for (std::size_t d = 0; d < D; ++d) {
        for (std::size_t l = 0; l < L; ++l) r[l] = rec.at(l, d) - class_means(c, d);
        long double q = 0.0L;
        for (std::size_t a = 0; a < L; ++a) {
          for (std::size_t b = 0; b < L; ++b) q += r[a] * prec[a][b] * r[b];
        }
        ll += -0.5L * q - 0.5L * logdet;
      }
      if (ll > best_ll) {
        best_ll = ll;
        best = c;
      }
    }
    if (static_cast<int>(best) == *rec.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  path_ = std::filesystem::temp_directory_path() /
          ("cfd_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace cfd::testing

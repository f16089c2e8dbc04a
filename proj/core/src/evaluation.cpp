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

#include "cfd/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cfd/error.hpp"
#include "cfd/objectives.hpp"
#include "cfd/ops.hpp"
#include "cfd/optim.hpp"
#include "cfd/rng.hpp"
#include "cfd/trainer.hpp"

namespace cfd {

double accuracy(const FamParams& params, const Dataset& labeled) {
  require(!labeled.empty(), ErrorCode::kInvalidArgument, "accuracy: empty dataset");
  require(labeled.has_labels(), ErrorCode::kBadLabel, "accuracy: dataset has no labels");
  const Predictions pred = predict(params, labeled);
  std::size_t hits = 0;
  std::size_t total = 0;
  for (std::size_t i = 0; i < labeled.size(); ++i) {
    const std::int32_t y = labeled.labels()[i];
    if (y < 0) continue;
    ++total;
    hits += pred.labels[i] == static_cast<std::size_t>(y) ? 1 : 0;
  }
  require(total > 0, ErrorCode::kBadLabel, "accuracy: no labelled records");
  return static_cast<double>(hits) / static_cast<double>(total);
}

std::size_t LinearProbe::predict(std::span<const double> x) const {
  Vec logits(w.rows());
  affine(w, b, x, logits);
  return static_cast<std::size_t>(std::max_element(logits.begin(), logits.end()) - logits.begin());
}

double LinearProbe::error(const Matrix& x, const std::vector<std::size_t>& y) const {
  require(x.rows() > 0, ErrorCode::kInvalidArgument, "probe error on empty split");
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < x.rows(); ++i) wrong += predict(x.row(i)) != y[i] ? 1 : 0;
  return static_cast<double>(wrong) / static_cast<double>(x.rows());
}

LinearProbe train_probe(const Matrix& x, const std::vector<std::size_t>& y,
                        std::size_t n_classes, const ProbeConfig& config) {
  require(x.rows() == y.size() && x.rows() > 0, ErrorCode::kInvalidArgument,
          "train_probe: empty or misaligned training set");
  Rng rng(config.seed);
  LinearProbe probe{ParamTensor("probe.w", n_classes, x.cols()),
                    ParamTensor("probe.b", n_classes, 1)};
  glorot_uniform(probe.w, rng);
  const std::size_t batch = std::max<std::size_t>(1, config.batch_size);
  Vec logits(n_classes), dlogits(n_classes);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const auto order = rng.permutation(x.rows());
    for (std::size_t begin = 0; begin < order.size(); begin += batch) {
      const std::size_t end = std::min(order.size(), begin + batch);
      const double inv = 1.0 / static_cast<double>(end - begin);
      for (std::size_t k = begin; k < end; ++k) {
        const std::size_t i = order[k];
        affine(probe.w, probe.b, x.row(i), logits);
        const Vec p = softmax(logits);
        std::fill(dlogits.begin(), dlogits.end(), 0.0);
        cross_entropy_backward(p, y[i], inv, dlogits);
        affine_backward(probe.w, probe.b, x.row(i), dlogits, {});
      }
      adam_step(probe.w, config.lr);
      adam_step(probe.b, config.lr);
    }
  }
  return probe;
}

namespace {

struct Split {
  Matrix train_x, test_x;
  std::vector<std::size_t> train_y, test_y;
};

Matrix rows_of(const Matrix& z, std::span<const std::size_t> ids) {
  Matrix out(ids.size(), z.cols());
  for (std::size_t i = 0; i < ids.size(); ++i) std::copy_n(z.row(ids[i]).begin(), z.cols(), out.row(i).begin());
  return out;
}

Matrix stack(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() + b.rows(), a.cols());
  std::copy(a.flat().begin(), a.flat().end(), out.flat().begin());
  std::copy(b.flat().begin(), b.flat().end(), out.flat().begin() + static_cast<std::ptrdiff_t>(a.size()));
  return out;
}

Matrix embed_dataset(const FamParams& params, const Dataset& d) {
  std::vector<FeatureRecord> records;
  records.reserve(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) records.push_back(d.record(i));
  return embed(params, records);
}

// Shuffles (x, y) and cuts it at train_fraction.
Split split(const Matrix& x, const std::vector<std::size_t>& y, double train_fraction, Rng& rng) {
  const auto order = rng.permutation(x.rows());
  const auto n_train = static_cast<std::size_t>(
      std::llround(static_cast<double>(x.rows()) * train_fraction));
  require(n_train >= 1 && n_train < x.rows(), ErrorCode::kInvalidArgument,
          "probe split leaves an empty side");
  std::span<const std::size_t> all(order);
  Split s;
  s.train_x = rows_of(x, all.first(n_train));
  s.test_x = rows_of(x, all.subspan(n_train));
  for (std::size_t i = 0; i < n_train; ++i) s.train_y.push_back(y[order[i]]);
  for (std::size_t i = n_train; i < order.size(); ++i) s.test_y.push_back(y[order[i]]);
  return s;
}

std::vector<std::size_t> labels_of(const Dataset& d) {
  require(d.has_labels(), ErrorCode::kBadLabel, "dataset '" + d.domain_tag() + "' has no labels");
  std::vector<std::size_t> y(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    require(d.labels()[i] >= 0, ErrorCode::kBadLabel, "record without label");
    y[i] = static_cast<std::size_t>(d.labels()[i]);
  }
  return y;
}

}  // namespace

double a_distance_from_error(double domain_error) {
  return std::clamp(2.0 * (1.0 - 2.0 * domain_error), 0.0, 2.0);
}

ADistanceResult a_distance(const FamParams& params, const Dataset& source, const Dataset& target,
                           const ProbeConfig& probe) {
  const std::size_t n = std::min(source.size(), target.size());
  require(n >= 10, ErrorCode::kInvalidArgument, "a_distance: need at least 10 examples per domain");
  require(probe.repeats >= 1, ErrorCode::kInvalidArgument, "probe repeats must be >= 1");
  Rng rng(probe.seed);
  const Matrix zs_all = embed_dataset(params, source);
  const Matrix zt_all = embed_dataset(params, target);
  std::vector<std::size_t> y(2 * n, 0);
  std::fill(y.begin() + static_cast<std::ptrdiff_t>(n), y.end(), 1);
  double error = 0.0;
  for (std::size_t r = 0; r < probe.repeats; ++r) {
    auto pick = [&](const Matrix& z, std::size_t size) {
      auto ids = rng.permutation(size);
      ids.resize(n);
      return rows_of(z, ids);
    };
    const Matrix zs = pick(zs_all, source.size());
    const Matrix zt = pick(zt_all, target.size());
    const Split s = split(stack(zs, zt), y, probe.train_fraction, rng);
    ProbeConfig pc = probe;
    pc.seed = rng.next_u64();
    error += train_probe(s.train_x, s.train_y, 2, pc).error(s.test_x, s.test_y);
  }
  ADistanceResult result;
  result.domain_error = error / static_cast<double>(probe.repeats);
  result.a_distance = a_distance_from_error(result.domain_error);
  return result;
}

JointErrorResult joint_error(const FamParams& params, const Dataset& source_labeled,
                             const Dataset& target_labeled, const ProbeConfig& probe) {
  require(target_labeled.has_labels(), ErrorCode::kBadLabel,
          "joint_error: target labels are required");
  require(probe.repeats >= 1, ErrorCode::kInvalidArgument, "probe repeats must be >= 1");
  Rng rng(probe.seed);
  const Matrix zs = embed_dataset(params, source_labeled);
  const Matrix zt = embed_dataset(params, target_labeled);
  const auto ys = labels_of(source_labeled);
  const auto yt = labels_of(target_labeled);
  JointErrorResult result;
  for (std::size_t r = 0; r < probe.repeats; ++r) {
    const Split s = split(zs, ys, probe.train_fraction, rng);
    const Split t = split(zt, yt, probe.train_fraction, rng);
    std::vector<std::size_t> y = s.train_y;
    y.insert(y.end(), t.train_y.begin(), t.train_y.end());
    ProbeConfig pc = probe;
    pc.seed = rng.next_u64();
    const LinearProbe clf = train_probe(stack(s.train_x, t.train_x), y, params.n_classes, pc);
    result.source_error += clf.error(s.test_x, s.test_y);
    result.target_error += clf.error(t.test_x, t.test_y);
  }
  result.source_error /= static_cast<double>(probe.repeats);
  result.target_error /= static_cast<double>(probe.repeats);
  result.joint_error = result.source_error + result.target_error;
  return result;
}

InDomainResult in_domain_fd_test(const Dataset& train, const Dataset& valid, const Dataset& test,
                                 const InDomainConfig& config, const ProbeConfig& probe) {
  require(train.size() >= 2 && !valid.empty() && !test.empty(), ErrorCode::kInvalidArgument,
          "in_domain_fd_test: every split needs records (train >= 2)");
  FamConfig fam = config.fam;
  fam.in_dim = train.dim();
  fam.validate(train.n_layers());
  const Rng root(config.seed);
  InDomainResult result;

  // Path A: distillation on all raw features, then a probe on frozen z.
  {
    Rng init = root.fork(1);
    Rng rng = root.fork(2);
    FamParams params = FamParams::init(fam, train.n_classes(), init);
    std::vector<FeatureRecord> pool;
    for (const Dataset* d : {&train, &valid, &test}) {
      for (std::size_t i = 0; i < d->size(); ++i) pool.push_back(d->record(i));
    }
    const std::size_t batch = std::min(config.batch_size, pool.size());
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
      const auto order = rng.permutation(pool.size());
      for (std::size_t begin = 0; begin + 2 <= order.size(); begin += batch) {
        const std::size_t end = std::min(order.size(), begin + batch);
        if (end - begin < 2) break;
        std::vector<FeatureRecord> b;
        for (std::size_t k = begin; k < end; ++k) b.push_back(pool[order[k]]);
        const NegativeSet neg = sample_negatives(b.size(), config.n_negatives, rng);
        nce_fd_loss(params, b, neg, 1.0);
        for (ParamTensor* t : params.tensors()) adam_step(*t, config.lr);
      }
    }
    ProbeConfig pc = probe;
    pc.seed = rng.next_u64();
    const LinearProbe clf =
        train_probe(embed_dataset(params, train), labels_of(train), train.n_classes(), pc);
    result.fd_accuracy = 1.0 - clf.error(embed_dataset(params, test), labels_of(test));
  }

  // Path B: supervised FAM + classifier.
  {
    Rng init = root.fork(1);
    Rng rng = root.fork(3);
    FamParams params = FamParams::init(fam, train.n_classes(), init);
    const auto examples = labeled_examples(train);
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
      const auto order = rng.permutation(examples.size());
      for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
        const std::size_t end = std::min(order.size(), begin + config.batch_size);
        std::vector<LabeledExample> b;
        for (std::size_t k = begin; k < end; ++k) b.push_back(examples[order[k]]);
        source_ce(params, b, 1.0);
        for (ParamTensor* t : params.tensors()) adam_step(*t, config.lr);
      }
    }
    result.supervised_accuracy = accuracy(params, test);
  }
  return result;
}

SeedStats summarize(std::vector<double> values) {
  SeedStats s;
  s.values = std::move(values);
  if (s.values.empty()) return s;
  const double n = static_cast<double>(s.values.size());
  s.mean = std::accumulate(s.values.begin(), s.values.end(), 0.0) / n;
  if (s.values.size() > 1) {
    double ss = 0.0;
    for (double v : s.values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / (n - 1.0));
  }
  return s;
}

nlohmann::ordered_json DiagnosticReport::to_json() const {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  if (accuracy) j["accuracy"] = *accuracy;
  if (adist) {
    j["a_distance"] = adist->a_distance;
    j["domain_error"] = adist->domain_error;
  }
  if (joint) {
    j["joint_error"] = joint->joint_error;
    j["joint_source_error"] = joint->source_error;
    j["joint_target_error"] = joint->target_error;
  }
  if (in_domain) {
    j["in_domain_fd_accuracy"] = in_domain->fd_accuracy;
    j["in_domain_supervised_accuracy"] = in_domain->supervised_accuracy;
  }
  return j;
}

}  // namespace cfd

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

#include "cfd/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "cfd/error.hpp"
#include "cfd/evaluation.hpp"
#include "cfd/ops.hpp"
#include "cfd/optim.hpp"
#include "cfd/rng.hpp"

namespace cfd {

namespace {

struct MethodName {
  Method method;
  const char* canonical;
  const char* table;
};

constexpr MethodName kMethodNames[] = {
    {Method::kSourceOnly, "source_only", "xlmr-10"},
    {Method::kP, "p", "p"},
    {Method::kPCfd, "p_cfd", "p+CFd"},
    {Method::kPC, "p_c", "p+C"},
    {Method::kPFd, "p_fd", "p+Fd"},
    {Method::kCfdOnly, "cfd_only", "CFd"},
    {Method::kFdOnly, "fd_only", "Fd"},
    {Method::kKl, "kl", "KL"},
    {Method::kMmd, "mmd", "MMD"},
    {Method::kAdv, "adv", "Adv"},
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Cycles through a seeded permutation of [0, n), reshuffling on wrap.
class BatchCursor {
 public:
  BatchCursor(std::size_t n, Rng& rng) : n_(n), rng_(&rng) { reshuffle(); }

  std::vector<std::size_t> next(std::size_t count) {
    std::vector<std::size_t> out;
    out.reserve(count);
    while (out.size() < count) {
      if (pos_ == order_.size()) reshuffle();
      out.push_back(order_[pos_++]);
    }
    return out;
  }

 private:
  void reshuffle() {
    order_ = rng_->permutation(n_);
    pos_ = 0;
  }

  std::size_t n_;
  Rng* rng_;
  std::vector<std::size_t> order_;
  std::size_t pos_ = 0;
};

std::vector<FeatureRecord> gather(const Dataset& d, const std::vector<std::size_t>& ids) {
  std::vector<FeatureRecord> out;
  out.reserve(ids.size());
  for (std::size_t i : ids) out.push_back(d.record(i));
  return out;
}

}  // namespace

std::string_view to_string(Method method) {
  for (const auto& m : kMethodNames) {
    if (m.method == method) return m.canonical;
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (const auto& m : kMethodNames) {
    if (name == m.canonical || name == m.table) return m.method;
  }
  if (name == "p+C (w/o Fd)") return Method::kPC;
  if (name == "p+Fd (w/o C)") return Method::kPFd;
  if (name == "Fd (w/o p+C)") return Method::kFdOnly;
  if (name == "CFd (w/o p)") return Method::kCfdOnly;
  fail(ErrorCode::kConfig, "unknown method '" + std::string(name) + "'");
}

MethodTerms terms_of(Method method) {
  MethodTerms t;
  switch (method) {
    case Method::kSourceOnly: break;
    case Method::kP: t.pseudo_ce = true; break;
    case Method::kPCfd: t.pseudo_ce = t.fd = t.intra_class = true; break;
    case Method::kPC: t.pseudo_ce = t.intra_class = true; break;
    case Method::kPFd: t.pseudo_ce = t.fd = true; break;
    case Method::kCfdOnly: t.fd = t.intra_class = true; break;
    case Method::kFdOnly: t.fd = true; break;
    case Method::kKl: t.kl = true; break;
    case Method::kMmd: t.mmd = true; break;
    case Method::kAdv: t.adv = true; break;
  }
  return t;
}

void TrainConfig::validate() const {
  const MethodTerms t = terms_of(method);
  require(lr > 0.0, ErrorCode::kConfig, "lr must be positive");
  require(max_epochs >= 1, ErrorCode::kConfig, "max_epochs must be >= 1");
  require(warmup_epochs >= 0, ErrorCode::kConfig, "warmup_epochs must be >= 0");
  require(plateau_patience >= 1, ErrorCode::kConfig, "plateau_patience must be >= 1");
  require(batch_cls >= 1, ErrorCode::kConfig, "batch_cls must be >= 1");
  if (t.needs_target_batch()) {
    require(batch_mi >= 2, ErrorCode::kConfig, "batch_mi must be >= 2 for pairwise terms");
  }
  if (t.fd) require(n_negatives >= 1, ErrorCode::kConfig, "n_negatives must be >= 1");
  require(lambda >= 0.0 && kl_weight >= 0.0 && mmd_weight >= 0.0 && adv_weight >= 0.0,
          ErrorCode::kConfig, "loss weights must be non-negative");
  require(schedule.alpha_max >= 0.0, ErrorCode::kConfig, "alpha_max must be >= 0");
  require(fam.tau > 0.0, ErrorCode::kConfig, "tau must be positive");
}

std::string TrainTrace::to_csv() const {
  static const char* kLossColumns[] = {kLossSource, kLossPseudo, kLossFd, kLossIntra,
                                       kLossKl,     kLossMmd,    kLossAdv};
  std::ostringstream out;
  out << "epoch,lr,alpha,k_target,n_pseudo,loss_total";
  for (const char* c : kLossColumns) out << ',' << c;
  out << ",L_intra_class,valid_acc,target_acc\n";
  for (const EpochRecord& r : epochs) {
    out << r.epoch << ',' << fmt(r.lr) << ',' << fmt(r.alpha) << ',' << r.k_target << ','
        << r.n_pseudo << ',' << fmt(r.losses.total);
    for (const char* c : kLossColumns) {
      out << ',';
      if (r.losses.has(c)) out << fmt(r.losses.get(c));
    }
    out << ',' << fmt(r.intra_class) << ',' << fmt(r.valid_accuracy) << ',';
    if (r.target_accuracy) out << fmt(*r.target_accuracy);
    out << '\n';
  }
  return out.str();
}

TrainResult train(const TrainConfig& config, const Manifest& manifest) {
  return train(config, load_experiment(manifest));
}

TrainResult train(const TrainConfig& config, const ExperimentData& data) {
  config.validate();
  check_compatible(data);
  const MethodTerms terms = terms_of(config.method);
  const Dataset& source = data.source_train;
  const Dataset& target = data.target_unlabeled;

  FamConfig fam = config.fam;
  fam.in_dim = source.dim();
  fam.validate(source.n_layers());

  const Rng root(config.seed);
  Rng init_rng = root.fork(1);
  Rng batch_rng = root.fork(2);
  Rng negative_rng = root.fork(3);

  TrainResult result{FamParams::init(fam, source.n_classes(), init_rng), {}};
  FamParams& params = result.params;
  auto tensors = params.tensors();

  const std::vector<LabeledExample> source_examples = labeled_examples(source);

  // Discrepancy baselines align against an unlabelled source sample of the
  // target set's size.
  std::vector<std::size_t> source_pool;
  if (terms.kl || terms.mmd || terms.adv) {
    auto perm = batch_rng.permutation(source.size());
    perm.resize(std::min(source.size(), target.size()));
    source_pool = std::move(perm);
  }

  BatchCursor target_cursor(target.size(), batch_rng);
  BatchCursor pool_cursor(std::max<std::size_t>(source_pool.size(), 1), batch_rng);
  const std::size_t batch_mi = std::min(config.batch_mi, target.size());
  const std::size_t pool_batch = std::min(config.batch_mi, source_pool.size());

  LrPlateau plateau(config.lr, config.plateau_patience);
  const std::size_t steps = (source.size() + config.batch_cls - 1) / config.batch_cls;

  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    EpochRecord record;
    record.epoch = epoch;
    record.lr = plateau.lr();

    // (1) pseudo labels
    PseudoLabelSet pseudo;
    const int schedule_epoch = epoch - config.warmup_epochs;
    if (terms.needs_pseudo_labels() && schedule_epoch >= 0) {
      record.k_target = k_at(config.schedule, schedule_epoch, target.size());
      pseudo = diversify(rank(params, target), static_cast<std::ptrdiff_t>(record.k_target),
                         source.n_classes());
      pseudo.epoch = epoch;
      if (terms.pseudo_ce) record.alpha = alpha_at(config.schedule, schedule_epoch);
    }
    record.n_pseudo = pseudo.size();
    const std::vector<LabeledExample> pseudo_examples = pseudo.examples(target);

    // (2) class centers, frozen for the epoch
    std::vector<LabeledExample> members = source_examples;
    members.insert(members.end(), pseudo_examples.begin(), pseudo_examples.end());
    const ClassCenters centers = class_centers(params, members, epoch);

    // (3) joint steps
    std::vector<std::size_t> source_order = batch_rng.permutation(source.size());
    std::size_t pseudo_pos = 0;
    std::vector<std::size_t> pseudo_order = batch_rng.permutation(pseudo_examples.size());
    LossReport sums;
    std::vector<double> component_sums;
    for (std::size_t step = 0; step < steps; ++step) {
      const std::size_t begin = step * config.batch_cls;
      const std::size_t end = std::min(source.size(), begin + config.batch_cls);
      std::vector<LabeledExample> source_batch;
      for (std::size_t i = begin; i < end; ++i) source_batch.push_back(source_examples[source_order[i]]);

      std::vector<LabeledExample> pseudo_batch;
      if (!pseudo_examples.empty()) {
        const std::size_t want = std::min(config.batch_cls, pseudo_examples.size());
        while (pseudo_batch.size() < want) {
          if (pseudo_pos == pseudo_order.size()) {
            pseudo_order = batch_rng.permutation(pseudo_examples.size());
            pseudo_pos = 0;
          }
          pseudo_batch.push_back(pseudo_examples[pseudo_order[pseudo_pos++]]);
        }
      }

      std::vector<FeatureRecord> target_batch;
      if (terms.needs_target_batch()) target_batch = gather(target, target_cursor.next(batch_mi));

      LossReport step_report;
      step_report.add(kLossSource, source_ce(params, source_batch, 1.0));
      if (terms.pseudo_ce) {
        step_report.add(kLossPseudo, pseudo_ce(params, pseudo_batch, record.alpha, 1.0));
      }
      if (terms.fd) {
        const NegativeSet negatives = sample_negatives(target_batch.size(), config.n_negatives,
                                                       negative_rng, config.exclude_self_negatives);
        step_report.add(kLossFd, nce_fd_loss(params, target_batch, negatives, 1.0).loss);
      }
      if (terms.intra_class) {
        std::vector<LabeledExample> batch_members = source_batch;
        batch_members.insert(batch_members.end(), pseudo_batch.begin(), pseudo_batch.end());
        const double n = static_cast<double>(batch_members.size());
        step_report.add(kLossIntra,
                        intra_class_loss(params, batch_members, centers, config.lambda / n) / n,
                        config.lambda);
      }
      if (terms.kl || terms.mmd || terms.adv) {
        std::vector<std::size_t> ids;
        for (std::size_t i : pool_cursor.next(pool_batch)) ids.push_back(source_pool[i]);
        const std::vector<FeatureRecord> pool_batch_records = gather(source, ids);
        if (terms.kl) {
          step_report.add(kLossKl,
                          kl_baseline(params, pool_batch_records, target_batch, config.kl_weight),
                          config.kl_weight);
        }
        if (terms.mmd) {
          step_report.add(kLossMmd,
                          mmd_baseline(params, pool_batch_records, target_batch, config.mmd_weight),
                          config.mmd_weight);
        }
        if (terms.adv) {
          step_report.add(kLossAdv, adv_baseline(params, pool_batch_records, target_batch,
                                                 config.adv_weight, 1.0));
        }
      }
      if (!std::isfinite(step_report.total)) {
        fail(ErrorCode::kNonFiniteLoss, "non-finite loss at epoch " + std::to_string(epoch));
      }
      for (ParamTensor* t : tensors) adam_step(*t, plateau.lr());

      if (component_sums.empty()) {
        sums = step_report;
        for (const auto& c : step_report.components) component_sums.push_back(c.value);
      } else {
        for (std::size_t i = 0; i < component_sums.size(); ++i) {
          component_sums[i] += step_report.components[i].value;
        }
      }
    }
    for (std::size_t i = 0; i < component_sums.size(); ++i) {
      record.losses.add(sums.components[i].name,
                        component_sums[i] / static_cast<double>(steps),
                        sums.components[i].weight);
    }

    // (4) evaluation with this epoch's frozen centers
    record.intra_class = intra_class_loss(params, members, centers);
    record.valid_accuracy = accuracy(params, data.source_valid);
    if (data.target_test) record.target_accuracy = accuracy(params, *data.target_test);
    result.trace.epochs.push_back(std::move(record));

    // (5) plateau rule
    plateau.observe(result.trace.epochs.back().valid_accuracy);
  }
  return result;
}

Predictions predict(const FamParams& params, const Dataset& dataset) {
  Predictions out;
  out.labels.resize(dataset.size());
  out.probs = Matrix(dataset.size(), params.n_classes);
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const ClassifierPass pass = classifier_forward(params, dataset.record(i));
    std::copy(pass.probs.begin(), pass.probs.end(), out.probs.row(i).begin());
    out.labels[i] = static_cast<std::size_t>(
        std::max_element(pass.probs.begin(), pass.probs.end()) - pass.probs.begin());
  }
  return out;
}

}  // namespace cfd

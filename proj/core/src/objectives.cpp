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

#include "cfd/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cfd/error.hpp"
#include "cfd/ops.hpp"
#include "cfd/rng.hpp"

namespace cfd {

std::vector<LabeledExample> labeled_examples(const Dataset& dataset) {
  std::vector<LabeledExample> out;
  out.reserve(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    FeatureRecord r = dataset.record(i);
    if (r.label) out.push_back({r, static_cast<std::size_t>(*r.label)});
  }
  return out;
}

ClassifierPass classifier_forward(const FamParams& params, const FeatureRecord& record) {
  ClassifierPass pass;
  pass.fam = fam_forward(params, record);
  pass.logits.resize(params.n_classes);
  affine(params.cls_w, params.cls_b, pass.fam.z, pass.logits);
  pass.probs = softmax(pass.logits);
  return pass;
}

void classifier_backward(FamParams& params, const ClassifierPass& pass,
                         std::span<const double> dlogits) {
  Vec dz(pass.fam.z.size(), 0.0);
  affine_backward(params.cls_w, params.cls_b, pass.fam.z, dlogits, dz);
  fam_backward(params, pass.fam, dz);
}

namespace {

double mean_ce(FamParams& params, std::span<const LabeledExample> batch, double grad_scale) {
  const double inv = 1.0 / static_cast<double>(batch.size());
  double total = 0.0;
  Vec dlogits(params.n_classes);
  for (const auto& ex : batch) {
    const ClassifierPass pass = classifier_forward(params, ex.record);
    total += cross_entropy(pass.probs, ex.label);
    if (grad_scale != 0.0) {
      std::fill(dlogits.begin(), dlogits.end(), 0.0);
      cross_entropy_backward(pass.probs, ex.label, grad_scale * inv, dlogits);
      classifier_backward(params, pass, dlogits);
    }
  }
  return total * inv;
}

}  // namespace

double source_ce(FamParams& params, std::span<const LabeledExample> batch, double grad_scale) {
  require(!batch.empty(), ErrorCode::kInvalidArgument, "source_ce: empty batch");
  return mean_ce(params, batch, grad_scale);
}

double pseudo_ce(FamParams& params, std::span<const LabeledExample> batch, double alpha,
                 double grad_scale) {
  require(alpha >= 0.0, ErrorCode::kInvalidArgument, "pseudo_ce: alpha must be >= 0");
  if (batch.empty()) return 0.0;
  return alpha * mean_ce(params, batch, grad_scale * alpha);
}

double entropy_score(const FamParams& params, const FeatureRecord& record) {
  return entropy(classifier_forward(params, record).probs);
}

double entropy_loss(FamParams& params, std::span<const FeatureRecord> batch,
                    double grad_scale) {
  require(!batch.empty(), ErrorCode::kInvalidArgument, "entropy_loss: empty batch");
  const double inv = 1.0 / static_cast<double>(batch.size());
  double total = 0.0;
  Vec dlogits(params.n_classes);
  for (const auto& r : batch) {
    const ClassifierPass pass = classifier_forward(params, r);
    total += entropy(pass.probs);
    if (grad_scale != 0.0) {
      std::fill(dlogits.begin(), dlogits.end(), 0.0);
      entropy_backward(pass.probs, grad_scale * inv, dlogits);
      classifier_backward(params, pass, dlogits);
    }
  }
  return total * inv;
}

Vec sum_last_n(const FeatureRecord& record, std::size_t n) {
  require(n >= 1 && n <= record.n_layers, ErrorCode::kShapeMismatch,
          "sum_last_n: asked for " + std::to_string(n) + " of " +
              std::to_string(record.n_layers) + " layers");
  Vec out(record.dim, 0.0);
  for (std::size_t l = record.n_layers - n; l < record.n_layers; ++l) {
    const auto row = record.layer(l);
    for (std::size_t d = 0; d < record.dim; ++d) out[d] += row[d];
  }
  return out;
}

NegativeSet::NegativeSet(std::size_t batch_size, std::vector<std::vector<std::size_t>> draws)
    : batch_size_(batch_size), draws_(std::move(draws)) {
  for (const auto& d : draws_) {
    require(d.size() == batch_size_, ErrorCode::kShapeMismatch,
            "negative draw length differs from batch size");
  }
}

NegativeSet sample_negatives(std::size_t batch_size, std::size_t n_neg, Rng& rng,
                             bool exclude_self) {
  require(batch_size >= 2, ErrorCode::kInvalidArgument,
          "sample_negatives: batch size must be >= 2");
  std::vector<std::vector<std::size_t>> draws;
  draws.reserve(n_neg);
  for (std::size_t k = 0; k < n_neg; ++k) {
    for (;;) {
      auto perm = rng.permutation(batch_size);
      bool ok = true;
      if (exclude_self) {
        for (std::size_t i = 0; i < batch_size && ok; ++i) ok = perm[i] != i;
      }
      if (ok) {
        draws.push_back(std::move(perm));
        break;
      }
    }
  }
  return NegativeSet(batch_size, std::move(draws));
}

NceStats nce_fd_loss(FamParams& params, std::span<const FeatureRecord> batch,
                     const NegativeSet& negatives, double grad_scale) {
  const std::size_t b = batch.size();
  require(b >= 1 && negatives.batch_size() == b, ErrorCode::kShapeMismatch,
          "nce_fd_loss: batch and negative set disagree");
  require(negatives.n_negatives() >= 1, ErrorCode::kInvalidArgument,
          "nce_fd_loss: need at least one negative draw");
  const std::size_t window = params.config.window();
  std::vector<Vec> xbar(b);
  for (std::size_t i = 0; i < b; ++i) xbar[i] = sum_last_n(batch[i], window);

  const double inv_b = 1.0 / static_cast<double>(b);
  const double inv_k = 1.0 / static_cast<double>(negatives.n_negatives());
  NceStats stats;
  Vec q(params.config.in_dim);
  Vec dq(params.config.in_dim);
  Vec dz(params.config.out_dim);
  for (std::size_t i = 0; i < b; ++i) {
    const FamOutput fam = fam_forward(params, batch[i]);
    dense_tanh(params.critic_w, params.critic_b, fam.z, q);
    const double pos = cosine_sim(q, xbar[i]);
    double neg = 0.0;
    for (std::size_t k = 0; k < negatives.n_negatives(); ++k) {
      neg += cosine_sim(q, xbar[negatives.index(i, k)]);
    }
    neg *= inv_k;
    stats.mean_positive += pos * inv_b;
    stats.mean_negative += neg * inv_b;
    stats.loss -= (pos - neg) * inv_b;
    if (grad_scale != 0.0) {
      std::fill(dq.begin(), dq.end(), 0.0);
      const double s = -grad_scale * inv_b;
      cosine_sim_backward(q, xbar[i], s, dq);
      for (std::size_t k = 0; k < negatives.n_negatives(); ++k) {
        cosine_sim_backward(q, xbar[negatives.index(i, k)], -s * inv_k, dq);
      }
      std::fill(dz.begin(), dz.end(), 0.0);
      dense_tanh_backward(params.critic_w, params.critic_b, fam.z, q, dq, dz);
      fam_backward(params, fam, dz);
    }
  }
  return stats;
}

ClassCenters class_centers(const FamParams& params, std::span<const LabeledExample> members,
                           int epoch_stamp) {
  ClassCenters c;
  c.centers = Matrix(params.n_classes, params.config.out_dim);
  c.counts.assign(params.n_classes, 0);
  c.epoch_stamp = epoch_stamp;
  for (const auto& ex : members) {
    require(ex.label < params.n_classes, ErrorCode::kBadLabel, "class_centers: label out of range");
    const FamOutput fam = fam_forward(params, ex.record);
    auto row = c.centers.row(ex.label);
    for (std::size_t d = 0; d < row.size(); ++d) row[d] += fam.z[d];
    ++c.counts[ex.label];
  }
  for (std::size_t k = 0; k < params.n_classes; ++k) {
    if (c.counts[k] == 0) continue;
    const double inv = 1.0 / static_cast<double>(c.counts[k]);
    for (double& v : c.centers.row(k)) v *= inv;
  }
  return c;
}

double intra_class_loss(FamParams& params, std::span<const LabeledExample> members,
                        const ClassCenters& centers, double grad_scale) {
  double total = 0.0;
  Vec diff(params.config.out_dim);
  for (const auto& ex : members) {
    require(centers.present(ex.label), ErrorCode::kInvalidArgument,
            "intra_class_loss: class " + std::to_string(ex.label) + " has no center");
    const FamOutput fam = fam_forward(params, ex.record);
    const auto center = centers.centers.row(ex.label);
    for (std::size_t d = 0; d < diff.size(); ++d) diff[d] = fam.z[d] - center[d];
    const double dist = norm2(diff);
    total += dist;
    if (grad_scale != 0.0 && dist > 0.0) {
      // Subgradient 0 at the center itself.
      for (double& v : diff) v *= grad_scale / dist;
      fam_backward(params, fam, diff);
    }
  }
  return total;
}

void LossReport::add(std::string name, double value, double weight) {
  components.push_back({std::move(name), value, weight});
  total += weight * value;
}

double LossReport::get(const std::string& name) const {
  for (const auto& c : components) {
    if (c.name == name) return c.value;
  }
  return 0.0;
}

bool LossReport::has(const std::string& name) const {
  return std::any_of(components.begin(), components.end(),
                     [&](const LossComponent& c) { return c.name == name; });
}

LossReport cfd_loss(FamParams& params, std::span<const FeatureRecord> target_batch,
                    std::span<const LabeledExample> members, const ClassCenters& centers,
                    const NegativeSet& negatives, double lambda, double grad_scale) {
  LossReport report;
  report.add(kLossFd, nce_fd_loss(params, target_batch, negatives, grad_scale).loss);
  if (lambda != 0.0 && !members.empty()) {
    const double n = static_cast<double>(members.size());
    report.add(kLossIntra, intra_class_loss(params, members, centers, grad_scale * lambda / n) / n,
               lambda);
  }
  return report;
}

Matrix embed(const FamParams& params, std::span<const FeatureRecord> batch) {
  Matrix z(batch.size(), params.config.out_dim);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const FamOutput fam = fam_forward(params, batch[i]);
    std::copy(fam.z.begin(), fam.z.end(), z.row(i).begin());
  }
  return z;
}

namespace {

Vec column_mean(const Matrix& z) {
  Vec m(z.cols(), 0.0);
  for (std::size_t i = 0; i < z.rows(); ++i) {
    for (std::size_t d = 0; d < z.cols(); ++d) m[d] += z(i, d);
  }
  for (double& v : m) v /= static_cast<double>(z.rows());
  return m;
}

}  // namespace

double kl_divergence_sym(const Matrix& zs, const Matrix& zt, Matrix* dzs, Matrix* dzt) {
  require(zs.rows() > 0 && zt.rows() > 0, ErrorCode::kInvalidArgument,
          "kl_baseline: empty batch");
  require(zs.cols() == zt.cols(), ErrorCode::kShapeMismatch, "kl_baseline: width mismatch");
  const Vec xs = softmax(column_mean(zs));
  const Vec xt = softmax(column_mean(zt));
  const std::size_t d = xs.size();
  double kl = 0.0;
  Vec log_ratio(d);
  for (std::size_t k = 0; k < d; ++k) {
    log_ratio[k] = std::log(xs[k]) - std::log(xt[k]);
    kl += (xs[k] - xt[k]) * log_ratio[k];
  }
  if (dzs != nullptr || dzt != nullptr) {
    Vec gs(d), gt(d);
    for (std::size_t k = 0; k < d; ++k) {
      gs[k] = log_ratio[k] + 1.0 - xt[k] / xs[k];
      gt[k] = -log_ratio[k] + 1.0 - xs[k] / xt[k];
    }
    Vec us(d, 0.0), ut(d, 0.0);
    softmax_backward(xs, gs, us);
    softmax_backward(xt, gt, ut);
    auto spread = [](const Vec& u, Matrix& out, std::size_t rows) {
      out = Matrix(rows, u.size());
      const double inv = 1.0 / static_cast<double>(rows);
      for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t k = 0; k < u.size(); ++k) out(i, k) = u[k] * inv;
      }
    };
    if (dzs != nullptr) spread(us, *dzs, zs.rows());
    if (dzt != nullptr) spread(ut, *dzt, zt.rows());
  }
  return kl;
}

double mmd2_multi_kernel(const Matrix& zs, const Matrix& zt, Matrix* dzs, Matrix* dzt) {
  const std::size_t ns = zs.rows();
  const std::size_t nt = zt.rows();
  require(ns >= 2 && nt >= 2, ErrorCode::kInvalidArgument,
          "mmd_baseline: both batches need at least two samples");
  require(zs.cols() == zt.cols(), ErrorCode::kShapeMismatch, "mmd_baseline: width mismatch");
  const std::size_t n = ns + nt;
  const std::size_t width = zs.cols();
  auto point = [&](std::size_t i) { return i < ns ? zs.row(i) : zt.row(i - ns); };
  auto coeff = [&](std::size_t i, std::size_t j) {
    const bool si = i < ns;
    const bool sj = j < ns;
    if (si && sj) return 1.0 / static_cast<double>(ns * ns);
    if (!si && !sj) return 1.0 / static_cast<double>(nt * nt);
    return -1.0 / static_cast<double>(ns * nt);
  };

  // Unordered pairs i < j; the diagonal contributes constants only.
  struct Pair {
    std::size_t i, j;
    double sq;
  };
  std::vector<Pair> pairs;
  pairs.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto a = point(i);
      const auto b = point(j);
      double sq = 0.0;
      for (std::size_t d = 0; d < width; ++d) sq += (a[d] - b[d]) * (a[d] - b[d]);
      pairs.push_back({i, j, sq});
    }
  }

  // Median pairwise distance; remember which pair(s) define it.
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t m = pairs.size();
  const std::size_t hi = m / 2;
  auto by_sq = [&](std::size_t a, std::size_t b) {
    return pairs[a].sq < pairs[b].sq || (pairs[a].sq == pairs[b].sq && a < b);
  };
  std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(hi), order.end(),
                   by_sq);
  std::vector<std::size_t> median_pairs = {order[hi]};
  if (m % 2 == 0) {
    const auto lo_it =
        std::max_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(hi), by_sq);
    median_pairs.push_back(*lo_it);
  }
  double median = 0.0;
  for (std::size_t p : median_pairs) median += std::sqrt(pairs[p].sq);
  median /= static_cast<double>(median_pairs.size());
  const bool median_degenerate = median <= 0.0;
  const double base = median_degenerate ? 1.0 : median;

  double value = 0.0;
  // Diagonal terms: k(x, x) = number of kernels for each i.
  const double n_kernels = static_cast<double>(std::size(kMmdBandwidthFactors));
  value += n_kernels * (static_cast<double>(ns) / static_cast<double>(ns * ns) +
                        static_cast<double>(nt) / static_cast<double>(nt * nt));

  const bool want_grad = dzs != nullptr || dzt != nullptr;
  Matrix grad(want_grad ? n : 0, width);
  double dbase = 0.0;
  for (const Pair& p : pairs) {
    const double c = 2.0 * coeff(p.i, p.j);  // ordered pairs (i, j) and (j, i)
    double k_sum = 0.0;
    double dk_dsq = 0.0;
    for (double f : kMmdBandwidthFactors) {
      const double sigma = base * f;
      const double k = std::exp(-p.sq / (2.0 * sigma * sigma));
      k_sum += k;
      dk_dsq += -k / (2.0 * sigma * sigma);
      // dk/dbase = k * sq / sigma^3 * f
      dbase += c * k * p.sq / (sigma * sigma * sigma) * f;
    }
    value += c * k_sum;
    if (want_grad) {
      const auto a = point(p.i);
      const auto b = point(p.j);
      auto ga = grad.row(p.i);
      auto gb = grad.row(p.j);
      for (std::size_t d = 0; d < width; ++d) {
        const double g = c * dk_dsq * 2.0 * (a[d] - b[d]);
        ga[d] += g;
        gb[d] -= g;
      }
    }
  }
  if (want_grad && !median_degenerate) {
    const double share = dbase / static_cast<double>(median_pairs.size());
    for (std::size_t idx : median_pairs) {
      const Pair& p = pairs[idx];
      const double dist = std::sqrt(p.sq);
      if (dist == 0.0) continue;
      const auto a = point(p.i);
      const auto b = point(p.j);
      auto ga = grad.row(p.i);
      auto gb = grad.row(p.j);
      for (std::size_t d = 0; d < width; ++d) {
        const double g = share * (a[d] - b[d]) / dist;
        ga[d] += g;
        gb[d] -= g;
      }
    }
  }
  if (dzs != nullptr) {
    *dzs = Matrix(ns, width);
    for (std::size_t i = 0; i < ns; ++i) std::copy_n(grad.row(i).begin(), width, dzs->row(i).begin());
  }
  if (dzt != nullptr) {
    *dzt = Matrix(nt, width);
    for (std::size_t i = 0; i < nt; ++i) {
      std::copy_n(grad.row(ns + i).begin(), width, dzt->row(i).begin());
    }
  }
  return value;
}

namespace {

using PairLoss = double (*)(const Matrix&, const Matrix&, Matrix*, Matrix*);

double batch_pair_loss(FamParams& params, std::span<const FeatureRecord> source,
                       std::span<const FeatureRecord> target, double grad_scale, PairLoss fn) {
  std::vector<FamOutput> fs, ft;
  Matrix zs(source.size(), params.config.out_dim);
  Matrix zt(target.size(), params.config.out_dim);
  for (std::size_t i = 0; i < source.size(); ++i) {
    fs.push_back(fam_forward(params, source[i]));
    std::copy(fs.back().z.begin(), fs.back().z.end(), zs.row(i).begin());
  }
  for (std::size_t i = 0; i < target.size(); ++i) {
    ft.push_back(fam_forward(params, target[i]));
    std::copy(ft.back().z.begin(), ft.back().z.end(), zt.row(i).begin());
  }
  if (grad_scale == 0.0) return fn(zs, zt, nullptr, nullptr);
  Matrix dzs, dzt;
  const double value = fn(zs, zt, &dzs, &dzt);
  Vec dz(params.config.out_dim);
  for (std::size_t i = 0; i < source.size(); ++i) {
    for (std::size_t d = 0; d < dz.size(); ++d) dz[d] = grad_scale * dzs(i, d);
    fam_backward(params, fs[i], dz);
  }
  for (std::size_t i = 0; i < target.size(); ++i) {
    for (std::size_t d = 0; d < dz.size(); ++d) dz[d] = grad_scale * dzt(i, d);
    fam_backward(params, ft[i], dz);
  }
  return value;
}

}  // namespace

double kl_baseline(FamParams& params, std::span<const FeatureRecord> source,
                   std::span<const FeatureRecord> target, double grad_scale) {
  return batch_pair_loss(params, source, target, grad_scale, &kl_divergence_sym);
}

double mmd_baseline(FamParams& params, std::span<const FeatureRecord> source,
                    std::span<const FeatureRecord> target, double grad_scale) {
  return batch_pair_loss(params, source, target, grad_scale, &mmd2_multi_kernel);
}

double adv_baseline(FamParams& params, std::span<const FeatureRecord> source,
                    std::span<const FeatureRecord> target, double reversal_weight,
                    double grad_scale) {
  require(!source.empty() && !target.empty(), ErrorCode::kInvalidArgument,
          "adv_baseline: batch must contain both domains");
  const double inv = 1.0 / static_cast<double>(source.size() + target.size());
  double total = 0.0;
  Vec logits(2), dlogits(2), dz(params.config.out_dim);
  auto run = [&](const FeatureRecord& r, std::size_t domain) {
    const FamOutput fam = fam_forward(params, r);
    affine(params.dom_w, params.dom_b, fam.z, logits);
    const Vec probs = softmax(logits);
    total += cross_entropy(probs, domain);
    if (grad_scale == 0.0) return;
    std::fill(dlogits.begin(), dlogits.end(), 0.0);
    cross_entropy_backward(probs, domain, grad_scale * inv, dlogits);
    std::fill(dz.begin(), dz.end(), 0.0);
    affine_backward(params.dom_w, params.dom_b, fam.z, dlogits, dz);
    for (double& g : dz) g *= -reversal_weight;
    fam_backward(params, fam, dz);
  };
  for (const auto& r : source) run(r, 0);
  for (const auto& r : target) run(r, 1);
  return total * inv;
}

}  // namespace cfd

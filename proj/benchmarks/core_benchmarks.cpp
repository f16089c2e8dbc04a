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

#include <benchmark/benchmark.h>

#include <vector>

#include "cfd/datagen.hpp"
#include "cfd/evaluation.hpp"
#include "cfd/fam.hpp"
#include "cfd/feature_store.hpp"
#include "cfd/objectives.hpp"
#include "cfd/presets.hpp"
#include "cfd/rng.hpp"
#include "cfd/self_training.hpp"
#include "cfd/trainer.hpp"

namespace {

using namespace cfd;

const SynthData& benchmark_data() {
  static const SynthData data = generate(benchmark_synth_config(1));
  return data;
}

FamParams benchmark_params(std::size_t out_dim) {
  FamConfig c = benchmark_train_config(Method::kPCfd, 1).fam;
  c.in_dim = benchmark_data().source_train.dim();
  c.out_dim = out_dim;
  Rng rng(1);
  return FamParams::init(c, 3, rng);
}

std::vector<FeatureRecord> first_records(const Dataset& d, std::size_t n) {
  std::vector<FeatureRecord> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(d.record(i));
  return out;
}

void BM_FamForward(benchmark::State& state) {
  const FamParams p = benchmark_params(static_cast<std::size_t>(state.range(0)));
  const FeatureRecord r = benchmark_data().source_train.record(0);
  for (auto _ : state) benchmark::DoNotOptimize(fam_forward(p, r));
}
BENCHMARK(BM_FamForward)->Arg(16)->Arg(32)->Arg(64);

void BM_FamForwardBackward(benchmark::State& state) {
  FamParams p = benchmark_params(32);
  const FeatureRecord r = benchmark_data().source_train.record(0);
  const Vec dz(32, 0.1);
  for (auto _ : state) {
    const FamOutput out = fam_forward(p, r);
    fam_backward(p, out, dz);
  }
  benchmark::DoNotOptimize(p.att_w.grad.flat().data());
}
BENCHMARK(BM_FamForwardBackward);

void BM_NceFdLoss(benchmark::State& state) {
  FamParams p = benchmark_params(32);
  const std::size_t batch = static_cast<std::size_t>(state.range(0));
  const auto recs = first_records(benchmark_data().target_unlabeled, batch);
  Rng rng(2);
  const NegativeSet neg = sample_negatives(batch, 10, rng);
  for (auto _ : state) benchmark::DoNotOptimize(nce_fd_loss(p, recs, neg, 1.0).loss);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(batch));
}
BENCHMARK(BM_NceFdLoss)->Arg(50)->Arg(200);

void BM_Mmd(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  Rng rng(3);
  Matrix a(n, 32), b(n, 32), da(n, 32), db(n, 32);
  for (double& v : a.flat()) v = rng.normal();
  for (double& v : b.flat()) v = rng.normal() + 0.5;
  for (auto _ : state) benchmark::DoNotOptimize(mmd2_multi_kernel(a, b, &da, &db));
}
BENCHMARK(BM_Mmd)->Arg(50);

void BM_RankDiversify(benchmark::State& state) {
  const FamParams p = benchmark_params(32);
  const Dataset& target = benchmark_data().target_unlabeled;
  for (auto _ : state) benchmark::DoNotOptimize(diversify(rank(p, target), 300, 3).size());
}
BENCHMARK(BM_RankDiversify)->Unit(benchmark::kMillisecond);

void BM_TrainEpoch(benchmark::State& state) {
  const SynthData& s = benchmark_data();
  const ExperimentData data{s.source_train, s.source_valid, s.target_unlabeled, s.target_test};
  TrainConfig c = benchmark_train_config(static_cast<Method>(state.range(0)), 1);
  c.max_epochs = 2;  // warm-up epoch plus one epoch with pseudo labels
  for (auto _ : state) benchmark::DoNotOptimize(train(c, data).trace.epochs.size());
  state.SetLabel(std::string(to_string(c.method)));
}
BENCHMARK(BM_TrainEpoch)
    ->Arg(static_cast<int>(Method::kSourceOnly))
    ->Arg(static_cast<int>(Method::kPCfd))
    ->Arg(static_cast<int>(Method::kMmd))
    ->Unit(benchmark::kMillisecond);

void BM_FeatsetRoundTrip(benchmark::State& state) {
  const Dataset& d = benchmark_data().target_test;
  for (auto _ : state) benchmark::DoNotOptimize(decode_featset(encode_featset(d)).size());
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(encode_featset(d).size()));
}
BENCHMARK(BM_FeatsetRoundTrip);

}  // namespace

BENCHMARK_MAIN();

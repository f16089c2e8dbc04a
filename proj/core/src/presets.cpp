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

#include "cfd/presets.hpp"

namespace cfd {

SynthConfig benchmark_synth_config(std::uint64_t seed) {
  SynthConfig config;
  config.seed = seed;
  return config;
}

TrainConfig benchmark_train_config(Method method, std::uint64_t seed) {
  TrainConfig config;
  config.method = method;
  config.seed = seed;
  config.fam.out_dim = 32;
  config.lr = 1e-2;
  config.lambda = 5.0;
  config.max_epochs = 40;
  config.schedule.k0 = 300;
  config.schedule.k_step = 100;
  // alpha reaches alpha_max on the final epoch.
  config.schedule.max_epoch = config.max_epochs - config.warmup_epochs - 1;
  return config;
}

}  // namespace cfd

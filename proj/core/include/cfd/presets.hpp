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

#ifndef CFD_PRESETS_HPP_
#define CFD_PRESETS_HPP_

// The desk-scale synthetic benchmark: the generator's defaults (3 classes,
// 4 layers of dim 16, class_sep 6, domain_shift 2, 900 source / 900 target)
// and a training recipe sized for it. The library defaults follow the
// full-scale recipe (lr 1e-4, K from 950 in steps of 100, lambda 1); with 900
// target records and a few hundred steps per run those are too slow and K
// would cover the whole target set at once, so the benchmark rescales them.

#include <cstdint>

#include "cfd/datagen.hpp"
#include "cfd/trainer.hpp"

namespace cfd {

SynthConfig benchmark_synth_config(std::uint64_t seed);
TrainConfig benchmark_train_config(Method method, std::uint64_t seed);

}  // namespace cfd

#endif  // CFD_PRESETS_HPP_

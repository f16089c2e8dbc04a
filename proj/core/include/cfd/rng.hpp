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

#ifndef CFD_RNG_HPP_
#define CFD_RNG_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

namespace cfd {

// SplitMix64 counter-based generator. The stream is fully specified so that
// any implementation reproduces it bit for bit:
//
//   state += 0x9E3779B97F4A7C15
//   z = state
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   return z ^ (z >> 31)
//
// uniform() keeps the top 53 bits. normal() uses one Box-Muller pair per call
// and discards the sine branch so the whole generator state is one u64.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();
  double uniform();                          // [0, 1)
  double uniform(double lo, double hi);      // [lo, hi)
  double normal();                           // N(0, 1)
  std::uint64_t below(std::uint64_t bound);  // uniform in [0, bound), unbiased
  std::vector<std::size_t> permutation(std::size_t n);

  // Independent child stream; does not advance this generator.
  Rng fork(std::uint64_t stream) const;

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

std::uint64_t mix64(std::uint64_t z);

}  // namespace cfd

#endif  // CFD_RNG_HPP_

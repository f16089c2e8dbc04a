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

#ifndef CFD_CHECKPOINT_HPP_
#define CFD_CHECKPOINT_HPP_

// FCKP checkpoint (little-endian):
//   0..3   magic "FCKP"
//   4..5   version u16 = 1
//   6..7   zero
//   8..11  metadata length u32, then that many bytes of UTF-8 JSON holding the
//          model shape (n_classes and the FAM config)
//   u32    tensor count, then per tensor:
//          u32 name length, name bytes, u32 rows, u32 cols,
//          rows * cols float64 values, row-major
// Only parameter values are stored; optimizer moments are not.

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "cfd/fam.hpp"

namespace cfd {

inline constexpr std::uint16_t kCheckpointVersion = 1;

std::vector<std::uint8_t> encode_checkpoint(const FamParams& params);
FamParams decode_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(const FamParams& params, const std::filesystem::path& path);
FamParams load_checkpoint(const std::filesystem::path& path);

}  // namespace cfd

#endif  // CFD_CHECKPOINT_HPP_

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

#ifndef CFD_ERROR_HPP_
#define CFD_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace cfd {

// Every failure the library reports carries one of these codes. The codes are
// grouped into categories that the command-line tool maps onto exit codes.
enum class ErrorCode {
  // Configuration / usage.
  kInvalidArgument,
  kConfig,
  // Data and file formats.
  kIo,
  kBadMagic,
  kUnsupportedVersion,
  kTruncated,
  kSizeMismatch,
  kNonFiniteFeature,
  kBadLabel,
  kOverflow,
  kMissingRole,
  kShapeMismatch,
  // Numerics.
  kZeroVector,
  kNonFiniteGradient,
  kNonFiniteLoss,
};

enum class ErrorCategory { kConfig, kData, kNumeric };

constexpr ErrorCategory category_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kConfig:
      return ErrorCategory::kConfig;
    case ErrorCode::kZeroVector:
    case ErrorCode::kNonFiniteGradient:
    case ErrorCode::kNonFiniteLoss:
      return ErrorCategory::kNumeric;
    default:
      return ErrorCategory::kData;
  }
}

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return category_of(code_); }

 private:
  ErrorCode code_;
};

// Raised when a feature file carries a NaN or Inf; remembers which record.
class NonFiniteFeatureError : public Error {
 public:
  NonFiniteFeatureError(std::size_t record_id, const std::string& message)
      : Error(ErrorCode::kNonFiniteFeature, message), record_id_(record_id) {}

  std::size_t record_id() const noexcept { return record_id_; }

 private:
  std::size_t record_id_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace cfd

#endif  // CFD_ERROR_HPP_

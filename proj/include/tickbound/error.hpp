// Copyright 2026 The tickbound Authors
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

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tickbound {

enum class ErrorKind {
  kDimensionMismatch,
  kEmptyOperand,
  kNonFinite,
  kNonHermitian,
  kInvalidState,
  kInvalidArgument,
  kNotConverged,
  kStepUnderflow,
  kTimeOutOfRange,
  kSurvivalUnderflow,
  kUnsupportedMoment,
  kNonPositiveVariance,
  kNoCrossing,
  kMultipleCrossings,
  kMuBelowFloor,
  kEnsembleRejection,
  kSchemaVersionUnsupported,
  kMalformedDocument,
  kInsufficientSamples,
  kAllCensored,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDimensionMismatch: return "DimensionMismatch";
    case ErrorKind::kEmptyOperand: return "EmptyOperand";
    case ErrorKind::kNonFinite: return "NonFinite";
    case ErrorKind::kNonHermitian: return "NonHermitian";
    case ErrorKind::kInvalidState: return "InvalidState";
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kNotConverged: return "NotConverged";
    case ErrorKind::kStepUnderflow: return "StepUnderflow";
    case ErrorKind::kTimeOutOfRange: return "TimeOutOfRange";
    case ErrorKind::kSurvivalUnderflow: return "SurvivalUnderflow";
    case ErrorKind::kUnsupportedMoment: return "UnsupportedMoment";
    case ErrorKind::kNonPositiveVariance: return "NonPositiveVariance";
    case ErrorKind::kNoCrossing: return "NoCrossing";
    case ErrorKind::kMultipleCrossings: return "MultipleCrossings";
    case ErrorKind::kMuBelowFloor: return "MuBelowFloor";
    case ErrorKind::kEnsembleRejection: return "EnsembleRejection";
    case ErrorKind::kSchemaVersionUnsupported: return "SchemaVersionUnsupported";
    case ErrorKind::kMalformedDocument: return "MalformedDocument";
    case ErrorKind::kInsufficientSamples: return "InsufficientSamples";
    case ErrorKind::kAllCensored: return "AllCensored";
  }
  return "Unknown";
}

/// Every failure raised by the library. `kind()` is stable and meant for
/// programmatic dispatch; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        std::optional<int> tick_index = std::nullopt)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind),
        tick_index_(tick_index) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// 1-based tick index for failures raised inside multi-tick sequences.
  std::optional<int> tick_index() const noexcept { return tick_index_; }

 private:
  ErrorKind kind_;
  std::optional<int> tick_index_;
};

}  // namespace tickbound

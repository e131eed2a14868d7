// Copyright 2026 The Authors.
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

#include <stdexcept>
#include <string>
#include <string_view>

namespace dpp {

enum class ErrorCode {
  kInvalidInput,
  kDegenerateItem,
  kNotLEnsemble,
  kDimensionMismatch,
  kParseError,
  kUnsupportedTopology,
  kZeroProbabilityCondition,
  kCardinalityMismatch,
  kInfeasibleCardinality,
  kInfeasibleWindow,
  kInternalDegeneracy,
  kDegenerateModel,
  kDiverged,
  kOverBudget,
};

inline std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidInput: return "invalid-input";
    case ErrorCode::kDegenerateItem: return "degenerate-item";
    case ErrorCode::kNotLEnsemble: return "not-an-L-ensemble";
    case ErrorCode::kDimensionMismatch: return "dimension-mismatch";
    case ErrorCode::kParseError: return "parse-error";
    case ErrorCode::kUnsupportedTopology: return "unsupported-topology";
    case ErrorCode::kZeroProbabilityCondition: return "zero-probability-condition";
    case ErrorCode::kCardinalityMismatch: return "cardinality-mismatch";
    case ErrorCode::kInfeasibleCardinality: return "infeasible-cardinality";
    case ErrorCode::kInfeasibleWindow: return "infeasible-window";
    case ErrorCode::kInternalDegeneracy: return "internal-degeneracy";
    case ErrorCode::kDegenerateModel: return "degenerate-model";
    case ErrorCode::kDiverged: return "diverged";
    case ErrorCode::kOverBudget: return "unsupported-scale";
  }
  return "unknown";
}

/// Model validation failures (bad kernels, malformed files) as opposed to
/// inference that is infeasible on an otherwise valid model.
inline bool is_validation_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidInput:
    case ErrorCode::kDegenerateItem:
    case ErrorCode::kNotLEnsemble:
    case ErrorCode::kDimensionMismatch:
    case ErrorCode::kParseError:
    case ErrorCode::kUnsupportedTopology:
      return true;
    default:
      return false;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace dpp

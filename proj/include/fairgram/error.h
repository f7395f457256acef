// Copyright 2026 The Fairgram Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
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

namespace fairgram {

enum class ErrorCode {
  // Grammar loading.
  kSchemaError,
  kUnresolvedRef,
  kSensitiveArity,
  kRecursionError,
  kTraceMismatch,
  // Generation.
  kDepthExceeded,
  kInsufficientAlternatives,
  kMultipleSensitiveSites,
  kMissingSensitiveSite,
  // Oracles.
  kTaskMismatch,
  kAmbiguousRules,
  // Models under test. Everything in this group is a "MUT error".
  kMutTimeout,
  kMutProtocol,
  kMutNonZeroExit,
  kMutHttp,
  // A model that can no longer be restarted; aborts the campaign.
  kMutUnavailable,
  // Statistics and analysis.
  kEmptyInput,
  kLabelCoverage,
  kInsufficientSentences,
  kCounterexampleFound,
  // Configuration and artifacts.
  kInvalidArgument,
  kPrecondition,
  kCorruptArtifact,
  kIo,
};

std::string_view error_code_name(ErrorCode code);

// True for per-item model failures that a campaign discards and logs.
constexpr bool is_mut_error(ErrorCode code) {
  return code == ErrorCode::kMutTimeout || code == ErrorCode::kMutProtocol ||
         code == ErrorCode::kMutNonZeroExit || code == ErrorCode::kMutHttp;
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fairgram

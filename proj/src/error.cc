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

#include "fairgram/error.h"

namespace fairgram {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSchemaError: return "SchemaError";
    case ErrorCode::kUnresolvedRef: return "UnresolvedRef";
    case ErrorCode::kSensitiveArity: return "SensitiveArity";
    case ErrorCode::kRecursionError: return "RecursionError";
    case ErrorCode::kTraceMismatch: return "TraceMismatch";
    case ErrorCode::kDepthExceeded: return "DepthExceeded";
    case ErrorCode::kInsufficientAlternatives: return "InsufficientAlternatives";
    case ErrorCode::kMultipleSensitiveSites: return "MultipleSensitiveSites";
    case ErrorCode::kMissingSensitiveSite: return "MissingSensitiveSite";
    case ErrorCode::kTaskMismatch: return "TaskMismatch";
    case ErrorCode::kAmbiguousRules: return "AmbiguousRules";
    case ErrorCode::kMutTimeout: return "MUTError(Timeout)";
    case ErrorCode::kMutProtocol: return "MUTError(ProtocolError)";
    case ErrorCode::kMutNonZeroExit: return "MUTError(NonZeroExit)";
    case ErrorCode::kMutHttp: return "MUTError(Http)";
    case ErrorCode::kMutUnavailable: return "MUTUnavailable";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kLabelCoverage: return "LabelCoverageError";
    case ErrorCode::kInsufficientSentences: return "InsufficientSentences";
    case ErrorCode::kCounterexampleFound: return "CounterexampleFound";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kPrecondition: return "PreconditionError";
    case ErrorCode::kCorruptArtifact: return "CorruptArtifact";
    case ErrorCode::kIo: return "IoError";
  }
  return "Unknown";
}

}  // namespace fairgram

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

#include "fairgram/task.h"

#include <cmath>
#include <string>

#include "fairgram/error.h"

namespace fairgram {

std::string_view task_name(Task task) {
  switch (task) {
    case Task::kSa: return "sa";
    case Task::kCoref: return "coref";
    case Task::kMlm: return "mlm";
  }
  return "?";
}

Task parse_task(std::string_view name) {
  if (name == "sa") return Task::kSa;
  if (name == "coref") return Task::kCoref;
  if (name == "mlm") return Task::kMlm;
  throw Error(ErrorCode::kInvalidArgument, "unknown task '" + std::string(name) + "'");
}

std::string_view sa_label_name(SaLabel label) {
  switch (label) {
    case SaLabel::kPositive: return "positive";
    case SaLabel::kNegative: return "negative";
    case SaLabel::kNeutral: return "neutral";
  }
  return "?";
}

SaLabel parse_sa_label(std::string_view name) {
  if (name == "positive") return SaLabel::kPositive;
  if (name == "negative") return SaLabel::kNegative;
  if (name == "neutral") return SaLabel::kNeutral;
  throw Error(ErrorCode::kSchemaError, "unknown sentiment label '" + std::string(name) + "'");
}

Task task_of(const TaskOutput& out) {
  return static_cast<Task>(out.index());
}

void validate_output(const TaskOutput& out) {
  if (const auto* sa = std::get_if<SaOutput>(&out)) {
    if (!std::isfinite(sa->score) || sa->score < -1.0 || sa->score > 1.0) {
      throw Error(ErrorCode::kSchemaError, "sentiment score outside [-1, 1]");
    }
  } else if (const auto* mlm = std::get_if<MlmOutput>(&out)) {
    for (const auto& [token, conf] : mlm->confidences) {
      if (!std::isfinite(conf) || conf < 0.0 || conf > 1.0) {
        throw Error(ErrorCode::kSchemaError, "confidence for '" + token + "' outside [0, 1]");
      }
    }
  }
}

}  // namespace fairgram

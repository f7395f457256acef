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

#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace fairgram {

enum class Task { kSa, kCoref, kMlm };

std::string_view task_name(Task task);
// Throws kInvalidArgument for unknown names.
Task parse_task(std::string_view name);

enum class SaLabel { kPositive, kNegative, kNeutral };

std::string_view sa_label_name(SaLabel label);
SaLabel parse_sa_label(std::string_view name);

struct SaOutput {
  SaLabel label = SaLabel::kNeutral;
  double score = 0.0;  // [-1, 1]

  bool operator==(const SaOutput&) const = default;
};

using Chain = std::vector<std::string>;

struct CorefOutput {
  std::vector<Chain> chains;

  bool operator==(const CorefOutput&) const = default;
};

struct MlmOutput {
  std::map<std::string, double> confidences;

  bool operator==(const MlmOutput&) const = default;
};

using TaskOutput = std::variant<SaOutput, CorefOutput, MlmOutput>;

Task task_of(const TaskOutput& out);

// Throws kSchemaError when an output breaks its value ranges.
void validate_output(const TaskOutput& out);

}  // namespace fairgram

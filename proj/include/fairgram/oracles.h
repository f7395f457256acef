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

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fairgram/grammar.h"
#include "fairgram/task.h"

namespace fairgram {

struct Verdict {
  bool fairness_violation = false;
  // Set only when a predictive oracle ran; one entry per sentence.
  std::optional<std::vector<bool>> prediction_errors;
  std::vector<TaskOutput> detail;
};

// Discrete label equality; scores are ignored.
Verdict judge_sa(std::span<const TaskOutput> outputs);

// Chains compared as sets of sets after each sentence's sensitive span is
// replaced by a shared placeholder.
Verdict judge_coref(std::span<const TaskOutput> outputs,
                    std::span<const std::string> sensitive_spans);

// Violation when some probe differs by more than tau between two outputs.
// A probe missing from an output counts as confidence 0.
Verdict judge_mlm(std::span<const TaskOutput> outputs, std::span<const std::string> probes,
                  double tau);

inline const std::vector<std::string>& default_probes() {
  static const std::vector<std::string> probes{"his", "her"};
  return probes;
}

inline constexpr double kTauGrid[] = {0.05, 0.10, 0.15, 0.20, 0.25, 0.30};

struct LabelRule {
  std::string contains;
  std::string label;

  bool operator==(const LabelRule&) const = default;
};

// Case-insensitive whole-word match. Returns the first matching rule's label;
// throws kAmbiguousRules if rules with different labels both match.
std::optional<std::string> predictive_label(std::string_view sentence,
                                            std::span<const LabelRule> rules);

// One rule per terminal of every labelled grammar rule, in rule order.
std::vector<LabelRule> label_rules_from_grammar(const Grammar& g);

std::vector<LabelRule> parse_label_rules(std::string_view json);
std::vector<LabelRule> load_label_rules(const std::filesystem::path& path);
std::string dump_label_rules(std::span<const LabelRule> rules);

// Marks each SA output whose label disagrees with its sentence's expected
// label. Sentences without an expected label never count as errors.
std::vector<bool> prediction_errors(std::span<const TaskOutput> outputs,
                                    std::span<const std::string> sentences,
                                    std::span<const LabelRule> rules);

}  // namespace fairgram

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

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fairgram/diagnosis.h"
#include "fairgram/grammar.h"
#include "fairgram/oracles.h"

namespace fairgram {

struct AugmentRecord {
  std::string text;
  std::string label;

  bool operator==(const AugmentRecord&) const = default;
};

struct AugmentOptions {
  std::size_t top_k = 5;
  double percent = 1.0;
  std::uint64_t base_size = 0;
  std::uint64_t seed = 0;
  // Rule whose terminals are restricted to the top-k; empty means the
  // grammar's single sensitive rule.
  std::string rule;
};

struct AugmentationSet {
  std::vector<AugmentRecord> records;
  std::vector<TerminalId> source_tokens;
  double percent = 0.0;
  std::uint64_t base_size = 0;
  std::uint64_t seed = 0;
  std::uint64_t attempts = 0;
  std::uint64_t unlabeled = 0;
};

std::uint64_t augmentation_size(double percent, std::uint64_t base_size);

// Fresh sentences whose target rule only yields the top-k diagnosed tokens,
// weighted by error rate; each is labelled by the predictive oracle.
// Throws kLabelCoverage when more than half the sentences get no label and
// kInsufficientSentences when the grammar runs out of distinct sentences.
AugmentationSet build_augmentation(const Grammar& g, const AnomalyReport& report,
                                   std::span<const LabelRule> label_rules,
                                   const AugmentOptions& opts);

// One {"text", "label"} object per line.
std::string augmentation_jsonl(const AugmentationSet& set);

}  // namespace fairgram

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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fairgram/generator.h"
#include "fairgram/grammar.h"

namespace fairgram {

inline constexpr double kAnomalyThreshold = 2.0;
inline constexpr std::size_t kMinSampledTerminals = 3;

// Median by full sort; even lengths average the middle pair. Throws
// kEmptyInput.
double median(std::span<const double> xs);

// Median absolute deviation from the median, unscaled.
double mad(std::span<const double> xs);

// (x - median) / mad. With mad == 0 the index is 0 at the median and
// +/-infinity elsewhere.
std::vector<double> anomaly_indices(std::span<const double> xs);

struct TokenDiagnosis {
  TerminalId terminal;
  std::uint64_t count = 0;
  std::uint64_t err = 0;
  double rate = 0.0;
  // Empty when the rule has too few sampled terminals to score.
  std::optional<double> index;
  bool flagged = false;

  bool operator==(const TokenDiagnosis&) const = default;
};

struct AnomalyReport {
  double threshold = kAnomalyThreshold;
  std::vector<TokenDiagnosis> tokens;  // (rule, literal) order
  std::vector<std::string> insufficient_rules;

  std::vector<TerminalId> flagged() const;
  bool operator==(const AnomalyReport&) const = default;
};

// Indices are computed within each rule over its terminals with count > 0.
AnomalyReport fault_diagnosis(const TokenCountMap& term_err, const TokenCountMap& term_count,
                              double threshold = kAnomalyThreshold);

// Highest rate first, then higher count, then literal order. `rule`
// restricts the candidates to one rule.
std::vector<TokenDiagnosis> top_k_tokens(const AnomalyReport& report, std::size_t k,
                                         const std::optional<std::string>& rule = std::nullopt);

}  // namespace fairgram

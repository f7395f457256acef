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
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fairgram/derivation.h"
#include "fairgram/grammar.h"
#include "fairgram/rng.h"
#include "fairgram/weights.h"

namespace fairgram {

// n equivalent sentences that share one derivation except for the single
// sensitive slot. traces[0] is the base derivation.
struct TestCase {
  std::vector<std::string> sentences;
  std::vector<DerivationTrace> traces;
  std::string sensitive_rule;
  std::vector<std::string> sensitive_choices;

  const DerivationTrace& base_trace() const { return traces.front(); }

  // Unordered sentence-set identity used for deduplication.
  std::string dedup_key() const;

  bool operator==(const TestCase&) const = default;
};

// Per-(rule, terminal) tallies.
class TokenCountMap {
 public:
  void add(const TerminalId& terminal, std::uint64_t amount = 1) { counts_[terminal] += amount; }
  std::uint64_t get(const TerminalId& terminal) const;
  void merge(const TokenCountMap& other);

  const std::map<TerminalId, std::uint64_t>& entries() const { return counts_; }
  bool empty() const { return counts_.empty(); }

  bool operator==(const TokenCountMap&) const = default;

 private:
  std::map<TerminalId, std::uint64_t> counts_;
};

// Adds one per sentence of `tc` to every terminal that sentence instantiates.
void update_term_count(TokenCountMap& map, const Grammar& g, const TestCase& tc);

// Expands g.start, drawing each alternative in proportion to `w`.
// Throws kDepthExceeded past Grammar::kMaxDepth.
DerivationTrace build_input(const Grammar& g, const WeightTable& w, Rng& rng);

// Returns k copies of `base` whose `sensitive` choice is redrawn uniformly,
// without replacement, from the bias-allowed alternatives other than the one
// `base` uses. Errors: kMultipleSensitiveSites, kMissingSensitiveSite,
// kInsufficientAlternatives.
std::vector<DerivationTrace> mutate_input(const Grammar& g, const DerivationTrace& base,
                                          std::string_view sensitive, std::size_t k, Rng& rng);

// Base input plus n - 1 mutations.
TestCase build_test(const Grammar& g, std::size_t n, const WeightTable& w,
                    std::string_view sensitive, Rng& rng);

// Copy of `trace` with the (single) choice of `rule` forced to the
// alternative whose literal is `literal`.
DerivationTrace modify_terminal(const Grammar& g, const DerivationTrace& trace,
                                std::string_view rule, std::string_view literal);

// Floor applied to error rates before normalizing PROB weights.
inline constexpr double kRateFloor = 0.01;

// PROB-phase weights. For every rule in `prob_rules`, an allowed alternative
// gets weight proportional to max(err/count, kRateFloor), where err/count is
// the rate of its leaf terminal (0 when unsampled or not a leaf). A rule whose
// rates are all zero keeps uniform weights, as do all other rules.
WeightTable get_probabilities(const Grammar& g, const TokenCountMap& term_count,
                              const TokenCountMap& term_err,
                              std::span<const std::string> prob_rules);

// True when all sentences of `tc` coincide once the sensitive slot is blanked.
bool differs_only_at_sensitive_slot(const Grammar& g, const TestCase& tc);

}  // namespace fairgram

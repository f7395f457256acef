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
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fairgram/diagnosis.h"
#include "fairgram/generator.h"
#include "fairgram/grammar.h"
#include "fairgram/mut.h"
#include "fairgram/oracles.h"
#include "fairgram/weights.h"

namespace fairgram {

enum class Phase { kRand, kProb };

std::string_view phase_name(Phase phase);
Phase parse_phase(std::string_view name);

struct OracleConfig {
  Task task = Task::kSa;
  double tau = 0.1;
  std::vector<std::string> probes = default_probes();
  // Enables prediction-error tracking (SA only).
  std::optional<std::vector<LabelRule>> label_rules;
};

Verdict judge(const OracleConfig& oracle, const TestCase& tc,
              std::span<const TaskOutput> outputs);

// One query per sentence of `tc`.
std::vector<Query> queries_for(const OracleConfig& oracle, const TestCase& tc);

struct CaseOutcome {
  TestCase test;
  Phase phase = Phase::kRand;
  std::uint64_t iteration = 0;
  bool violation = false;
  std::vector<bool> prediction_errors;
  std::vector<TaskOutput> outputs;
};

struct PhaseStats {
  Phase phase = Phase::kRand;
  std::uint64_t iterations = 0;
  std::uint64_t unique = 0;
  std::uint64_t duplicates = 0;
  std::uint64_t violations = 0;
  std::uint64_t mut_failures = 0;
  std::uint64_t prediction_errors = 0;
  bool saturated = false;
  TokenCountMap term_count;
  TokenCountMap term_err;
  std::vector<std::string> failure_log;  // first few adapter errors

  double error_rate() const {
    return unique == 0 ? 0.0 : static_cast<double>(violations) / static_cast<double>(unique);
  }
};

struct CampaignState {
  std::uint64_t seed = 0;
  std::set<std::string> s_count;  // dedup keys of kept test cases
  std::set<std::string> s_err;    // dedup keys of violating test cases
  TokenCountMap term_count;
  TokenCountMap term_err;
  std::vector<PhaseStats> phases;
  std::vector<CaseOutcome> cases;  // kept test cases, in iteration order
  std::map<Phase, std::uint64_t> cursor;  // next iteration index per phase
};

struct CampaignOptions {
  std::size_t n = 2;
  std::uint64_t iters = 1000;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  std::string sensitive;
  // Empty means the grammar's prob_rules.
  std::vector<std::string> prob_rules;
  std::vector<Phase> phases = {Phase::kRand, Phase::kProb};
  double threshold = kAnomalyThreshold;
  OracleConfig oracle;
  // Treat `iters` as a cap and stop after two consecutive windows that add no
  // new test case.
  bool saturation = false;
  std::size_t window = 500;
  bool keep_outputs = true;
};

inline constexpr std::size_t kMaxLoggedFailures = 20;

// Runs `iters` iterations of `phase` with weights `w`, updating `state`.
PhaseStats run_phase(Model& model, const Grammar& g, const CampaignOptions& opts, Phase phase,
                     const WeightTable& w, std::uint64_t iters, CampaignState& state);

struct CampaignResult {
  CampaignState state;
  // Diagnosis of the RAND maps, or of the cumulative maps without a RAND phase.
  AnomalyReport diagnosis;
  WeightTable prob_weights;
};

CampaignResult run_individual_campaign(Model& model, const Grammar& g,
                                       const CampaignOptions& opts);

// Violations among kept cases when re-judged at each tau (MLM only).
std::vector<std::uint64_t> violations_by_tau(const CampaignState& state,
                                             std::span<const std::string> probes,
                                             std::span<const double> taus);

// The grammar's single sensitive rule, or `requested` when given.
std::string resolve_sensitive(const Grammar& g, const std::string& requested);

}  // namespace fairgram

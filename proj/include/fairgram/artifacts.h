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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fairgram/campaign.h"
#include "fairgram/coverage.h"
#include "fairgram/derivation.h"
#include "fairgram/diagnosis.h"
#include "fairgram/group.h"
#include "json.hpp"

namespace fairgram {

// All loaders throw kCorruptArtifact on malformed or truncated input.

// Count maps, dedup sets, per-phase statistics and RNG cursors. Kept test
// cases live in the jsonl artifacts instead.
std::string dump_state(const CampaignState& state);
CampaignState parse_state(std::string_view text);

std::string dump_cases(const CampaignState& state, bool violations_only);
std::vector<CaseOutcome> parse_cases(std::string_view text);

struct TraceRecord {
  Phase phase = Phase::kRand;
  std::uint64_t iteration = 0;
  std::size_t sentence = 0;
  DerivationTrace trace;

  bool operator==(const TraceRecord&) const = default;
};

// One line per sentence of every kept test case.
std::string dump_traces(const CampaignState& state, const Grammar& g);
std::vector<TraceRecord> parse_traces(std::string_view text);

// Columns: rule, terminal, count, err, rate, index, flagged.
std::string dump_diagnosis_tsv(const AnomalyReport& report);
AnomalyReport parse_diagnosis_tsv(std::string_view text, double threshold = kAnomalyThreshold);

nlohmann::ordered_json coverage_json(const CoverageReport& c);
std::string format_coverage_table(const std::vector<std::pair<std::string, CoverageReport>>& rows);

struct CampaignSummary {
  nlohmann::ordered_json config;
  const CampaignResult* result = nullptr;
  std::vector<std::pair<std::string, CoverageReport>> coverage;
  std::vector<std::pair<double, std::uint64_t>> tau_sweep;  // MLM only
};

// report.json without timing; callers add it.
nlohmann::ordered_json campaign_report_json(const CampaignSummary& summary);
std::string campaign_report_text(const CampaignSummary& summary);

nlohmann::ordered_json group_report_json(const GroupReport& report,
                                         const nlohmann::ordered_json& config,
                                         std::string_view mut_name);
std::string group_report_tsv(const GroupReport& report);
std::string group_summary_table(const GroupReport& report, std::string_view mut_name);

// Non-finite indices are written as "inf" / "-inf"; absent ones as null.
nlohmann::ordered_json index_json(const std::optional<double>& index);

}  // namespace fairgram

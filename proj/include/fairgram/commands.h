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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fairgram/artifacts.h"
#include "fairgram/augment.h"
#include "fairgram/campaign.h"
#include "fairgram/config.h"
#include "fairgram/coverage.h"
#include "fairgram/group.h"

namespace fairgram {

struct TestRun {
  CampaignResult result;
  std::uint64_t violations = 0;
};

// Runs the configured phases and writes report.json, report.txt, state.json,
// unique_tests.jsonl, violations.jsonl, traces.jsonl and diagnosis.tsv into
// `out_dir`.
TestRun run_test_command(const CampaignConfig& config, const std::filesystem::path& out_dir,
                         std::size_t workers);

// Writes group.json and group.tsv into `out_dir`.
GroupReport run_group_command(const CampaignConfig& config, const std::filesystem::path& out_dir,
                              std::size_t workers);

// Diagnosis of the first RAND phase in a saved state (cumulative maps when
// there is none).
AnomalyReport diagnose_state(const CampaignState& state, double threshold);

// Coverage of trace records, one row per phase plus "all".
std::vector<std::pair<std::string, CoverageReport>> coverage_by_phase(
    const Grammar& g, const std::vector<TraceRecord>& records);

}  // namespace fairgram

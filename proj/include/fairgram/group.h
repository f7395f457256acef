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

#include "fairgram/grammar.h"
#include "fairgram/mut.h"
#include "fairgram/task.h"

namespace fairgram {

inline constexpr std::size_t kDefaultItersPerGroup = 150;

struct GroupOptions {
  Task task = Task::kMlm;
  std::string sensitive;
  std::size_t iters_per_group = kDefaultItersPerGroup;
  // MLM: confidence tokens. SA: label names, scored 1 when predicted.
  std::vector<std::string> probes = {"his", "her"};
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  double threshold = 2.0;
};

struct GroupScore {
  std::string group;
  std::string probe;
  double mean_score = 0.0;
  std::uint64_t sample_count = 0;
  double anomaly_index = 0.0;
  bool violation = false;

  bool operator==(const GroupScore&) const = default;
};

struct ProbeSummary {
  std::string probe;
  std::uint64_t violations = 0;
  std::uint64_t groups = 0;

  double percent() const {
    return groups == 0 ? 0.0 : 100.0 * static_cast<double>(violations) / groups;
  }
  bool operator==(const ProbeSummary&) const = default;
};

struct GroupReport {
  std::vector<GroupScore> scores;  // group-major, probes in option order
  std::vector<ProbeSummary> summary;
  std::vector<std::string> bases;  // base sentences, rendered with the first group
  std::uint64_t mut_failures = 0;
};

// Every group sees the same base inputs with the sensitive terminal forced to
// that group. Needs at least three groups (kPrecondition).
GroupReport run_group_campaign(Model& model, const Grammar& g, const GroupOptions& opts);

struct StrictnessReport {
  std::uint64_t instances = 0;
  std::uint64_t parity_violations = 0;  // mean scores not all equal
  std::uint64_t anomaly_violations = 0;  // some group with |index| > threshold
  std::uint64_t strict_witnesses = 0;  // unequal means, no anomalous group

  bool strictness_shown() const { return strict_witnesses > 0; }
};

bool violates_mean_parity(std::span<const double> scores);
bool violates_anomaly_bound(std::span<const double> scores, double threshold = 2.0);

// Any anomalous group implies unequal means. Throws kCounterexampleFound on
// an instance that breaks this.
StrictnessReport check_strictness(std::span<const std::vector<double>> score_sets);

}  // namespace fairgram

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

#include "fairgram/group.h"

#include <cmath>
#include <set>

#include "fairgram/derivation.h"
#include "fairgram/diagnosis.h"
#include "fairgram/error.h"
#include "fairgram/generator.h"
#include "fairgram/rng.h"
#include "fairgram/weights.h"

namespace fairgram {
namespace {

double probe_score(const TaskOutput& out, const std::string& probe) {
  if (const auto* mlm = std::get_if<MlmOutput>(&out)) {
    auto it = mlm->confidences.find(probe);
    return it == mlm->confidences.end() ? 0.0 : it->second;
  }
  if (const auto* sa = std::get_if<SaOutput>(&out)) {
    return sa_label_name(sa->label) == probe ? 1.0 : 0.0;
  }
  throw Error(ErrorCode::kTaskMismatch, "group scores need MLM or SA outputs");
}

}  // namespace

GroupReport run_group_campaign(Model& model, const Grammar& g, const GroupOptions& opts) {
  if (opts.task == Task::kCoref) {
    throw Error(ErrorCode::kTaskMismatch, "group campaigns support MLM and SA");
  }
  if (opts.probes.empty()) throw Error(ErrorCode::kInvalidArgument, "no probes given");
  if (opts.iters_per_group == 0) {
    throw Error(ErrorCode::kInvalidArgument, "iters_per_group must be positive");
  }
  if (!g.is_sensitive(opts.sensitive)) {
    throw Error(ErrorCode::kInvalidArgument, "'" + opts.sensitive + "' is not a sensitive rule");
  }
  std::vector<std::string> groups;
  for (std::size_t index : g.allowed_alternatives(opts.sensitive)) {
    groups.emplace_back(*g.alternatives(opts.sensitive)[index].leaf_literal());
  }
  if (groups.size() < 3) {
    throw Error(ErrorCode::kPrecondition, "group fairness needs at least three groups, got " +
                                              std::to_string(groups.size()));
  }

  // Distinct base derivations, identified by their rendering with the first group.
  const WeightTable w = equal_prob(g);
  std::vector<DerivationTrace> bases;
  std::set<std::string> seen;
  const std::uint64_t max_attempts = 50 * static_cast<std::uint64_t>(opts.iters_per_group);
  for (std::uint64_t i = 0; i < max_attempts && bases.size() < opts.iters_per_group; ++i) {
    Rng rng = Rng::derive(opts.seed, Stream::kGroup, i);
    DerivationTrace base =
        modify_terminal(g, build_input(g, w, rng), opts.sensitive, groups.front());
    if (seen.insert(base.sentence).second) bases.push_back(std::move(base));
  }

  GroupReport report;
  for (const DerivationTrace& b : bases) report.bases.push_back(b.sentence);
  std::vector<Query> queries;
  for (const std::string& group : groups) {
    for (const DerivationTrace& b : bases) {
      Query q{opts.task, modify_terminal(g, b, opts.sensitive, group).sentence, {}};
      if (opts.task == Task::kMlm) q.probes = opts.probes;
      queries.push_back(std::move(q));
    }
  }
  const std::vector<EvalResult> results =
      batch_evaluate(model, queries, std::max<std::size_t>(1, opts.workers));

  std::vector<std::vector<double>> means(opts.probes.size());
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    std::vector<double> sums(opts.probes.size(), 0.0);
    std::uint64_t count = 0;
    for (std::size_t bi = 0; bi < bases.size(); ++bi) {
      const EvalResult& r = results[gi * bases.size() + bi];
      if (!r.ok()) {
        if (r.error->code() == ErrorCode::kMutUnavailable) throw *r.error;
        ++report.mut_failures;
        continue;
      }
      ++count;
      for (std::size_t p = 0; p < opts.probes.size(); ++p) {
        sums[p] += probe_score(*r.output, opts.probes[p]);
      }
    }
    if (count == 0) {
      throw Error(ErrorCode::kMutUnavailable, "no successful queries for group '" +
                                                  groups[gi] + "'");
    }
    for (std::size_t p = 0; p < opts.probes.size(); ++p) {
      GroupScore s;
      s.group = groups[gi];
      s.probe = opts.probes[p];
      s.mean_score = sums[p] / static_cast<double>(count);
      s.sample_count = count;
      means[p].push_back(s.mean_score);
      report.scores.push_back(std::move(s));
    }
  }

  for (std::size_t p = 0; p < opts.probes.size(); ++p) {
    const std::vector<double> idx = anomaly_indices(means[p]);
    ProbeSummary summary{opts.probes[p], 0, groups.size()};
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
      GroupScore& s = report.scores[gi * opts.probes.size() + p];
      s.anomaly_index = idx[gi];
      s.violation = std::fabs(idx[gi]) > opts.threshold;
      if (s.violation) ++summary.violations;
    }
    report.summary.push_back(std::move(summary));
  }
  return report;
}

bool violates_mean_parity(std::span<const double> scores) {
  for (double s : scores) {
    if (s != scores.front()) return true;
  }
  return false;
}

bool violates_anomaly_bound(std::span<const double> scores, double threshold) {
  for (double index : anomaly_indices(scores)) {
    if (std::fabs(index) > threshold) return true;
  }
  return false;
}

StrictnessReport check_strictness(std::span<const std::vector<double>> score_sets) {
  StrictnessReport report;
  for (const std::vector<double>& scores : score_sets) {
    if (scores.size() < 3) {
      throw Error(ErrorCode::kPrecondition, "each score vector needs at least three groups");
    }
    const bool parity = violates_mean_parity(scores);
    const bool anomalous = violates_anomaly_bound(scores);
    if (anomalous && !parity) {
      throw Error(ErrorCode::kCounterexampleFound,
                  "instance " + std::to_string(report.instances) +
                      " has an anomalous group although all means are equal");
    }
    ++report.instances;
    report.parity_violations += parity ? 1 : 0;
    report.anomaly_violations += anomalous ? 1 : 0;
    report.strict_witnesses += parity && !anomalous ? 1 : 0;
  }
  return report;
}

}  // namespace fairgram

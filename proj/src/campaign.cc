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

#include "fairgram/campaign.h"

#include <algorithm>
#include <utility>

#include "fairgram/error.h"
#include "fairgram/parallel.h"
#include "fairgram/rng.h"

namespace fairgram {
namespace {

Stream stream_of(Phase phase) { return phase == Phase::kRand ? Stream::kRand : Stream::kProb; }

}  // namespace

std::string_view phase_name(Phase phase) { return phase == Phase::kRand ? "rand" : "prob"; }

Phase parse_phase(std::string_view name) {
  if (name == "rand") return Phase::kRand;
  if (name == "prob") return Phase::kProb;
  throw Error(ErrorCode::kInvalidArgument, "unknown phase '" + std::string(name) + "'");
}

std::string resolve_sensitive(const Grammar& g, const std::string& requested) {
  if (!requested.empty()) {
    if (!g.is_sensitive(requested)) {
      throw Error(ErrorCode::kInvalidArgument, "'" + requested + "' is not a sensitive rule");
    }
    return requested;
  }
  if (g.sensitive().size() != 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "grammar declares " + std::to_string(g.sensitive().size()) +
                    " sensitive rules; choose one");
  }
  return g.sensitive().front();
}

std::vector<Query> queries_for(const OracleConfig& oracle, const TestCase& tc) {
  std::vector<Query> out;
  for (const std::string& s : tc.sentences) {
    Query q{oracle.task, s, {}};
    if (oracle.task == Task::kMlm) q.probes = oracle.probes;
    out.push_back(std::move(q));
  }
  return out;
}

Verdict judge(const OracleConfig& oracle, const TestCase& tc,
              std::span<const TaskOutput> outputs) {
  Verdict v;
  switch (oracle.task) {
    case Task::kSa: v = judge_sa(outputs); break;
    case Task::kCoref: v = judge_coref(outputs, tc.sensitive_choices); break;
    case Task::kMlm: v = judge_mlm(outputs, oracle.probes, oracle.tau); break;
  }
  if (oracle.label_rules && oracle.task == Task::kSa) {
    v.prediction_errors = prediction_errors(outputs, tc.sentences, *oracle.label_rules);
  }
  return v;
}

PhaseStats run_phase(Model& model, const Grammar& g, const CampaignOptions& opts, Phase phase,
                     const WeightTable& w, std::uint64_t iters, CampaignState& state) {
  if (opts.n == 0) throw Error(ErrorCode::kInvalidArgument, "n must be at least 1");
  if (auto t = model.task(); t && *t != opts.oracle.task) {
    throw Error(ErrorCode::kTaskMismatch, "model task differs from the campaign task");
  }
  const std::string sensitive = resolve_sensitive(g, opts.sensitive);
  const std::size_t window = std::max<std::size_t>(1, opts.window);
  PhaseStats stats;
  stats.phase = phase;
  std::uint64_t& cursor = state.cursor[phase];
  int idle_windows = 0;

  while (stats.iterations < iters) {
    const std::size_t size =
        static_cast<std::size_t>(std::min<std::uint64_t>(window, iters - stats.iterations));
    const std::uint64_t first = cursor;

    std::vector<TestCase> built(size);
    parallel_for(size, opts.workers, [&](std::size_t i) {
      Rng rng = Rng::derive(state.seed, stream_of(phase), first + i);
      built[i] = build_test(g, opts.n, w, sensitive, rng);
    });

    std::vector<std::size_t> fresh;
    std::set<std::string> window_keys;
    for (std::size_t i = 0; i < size; ++i) {
      const std::string key = built[i].dedup_key();
      if (state.s_count.count(key) != 0 || !window_keys.insert(key).second) {
        ++stats.duplicates;
      } else {
        fresh.push_back(i);
      }
    }

    std::vector<Query> queries;
    for (std::size_t i : fresh) {
      for (Query& q : queries_for(opts.oracle, built[i])) queries.push_back(std::move(q));
    }
    const std::vector<EvalResult> results =
        queries.empty() ? std::vector<EvalResult>{}
                        : batch_evaluate(model, queries, std::max<std::size_t>(1, opts.workers));

    std::uint64_t added = 0;
    std::size_t offset = 0;
    for (std::size_t i : fresh) {
      TestCase& tc = built[i];
      const std::size_t k = tc.sentences.size();
      std::vector<TaskOutput> outputs;
      const Error* failure = nullptr;
      for (std::size_t j = 0; j < k; ++j) {
        const EvalResult& r = results[offset + j];
        if (!r.ok()) {
          failure = &*r.error;
          break;
        }
        outputs.push_back(*r.output);
      }
      offset += k;
      if (failure != nullptr) {
        if (failure->code() == ErrorCode::kMutUnavailable) throw *failure;
        ++stats.mut_failures;
        if (stats.failure_log.size() < kMaxLoggedFailures) {
          stats.failure_log.push_back("iteration " + std::to_string(first + i) + ": " +
                                      failure->what());
        }
        continue;
      }
      const Verdict v = judge(opts.oracle, tc, outputs);
      const std::string key = tc.dedup_key();
      state.s_count.insert(key);
      ++stats.unique;
      ++added;
      update_term_count(stats.term_count, g, tc);
      update_term_count(state.term_count, g, tc);
      if (v.fairness_violation) {
        state.s_err.insert(key);
        ++stats.violations;
        update_term_count(stats.term_err, g, tc);
        update_term_count(state.term_err, g, tc);
      }
      CaseOutcome outcome;
      outcome.phase = phase;
      outcome.iteration = first + i;
      outcome.violation = v.fairness_violation;
      if (v.prediction_errors) {
        outcome.prediction_errors = *v.prediction_errors;
        stats.prediction_errors += static_cast<std::uint64_t>(
            std::count(outcome.prediction_errors.begin(), outcome.prediction_errors.end(), true));
      }
      if (opts.keep_outputs) outcome.outputs = std::move(outputs);
      outcome.test = std::move(tc);
      state.cases.push_back(std::move(outcome));
    }

    cursor += size;
    stats.iterations += size;
    if (opts.saturation) {
      idle_windows = added == 0 ? idle_windows + 1 : 0;
      if (idle_windows >= 2) {
        stats.saturated = true;
        break;
      }
    }
  }
  return stats;
}

CampaignResult run_individual_campaign(Model& model, const Grammar& g,
                                       const CampaignOptions& opts) {
  CampaignResult result;
  result.state.seed = opts.seed;
  const std::vector<std::string> prob_rules =
      opts.prob_rules.empty() ? g.prob_rules() : opts.prob_rules;
  for (const std::string& rule : prob_rules) g.alternatives(rule);

  bool diagnosed = false;
  for (Phase phase : opts.phases) {
    WeightTable w = equal_prob(g);
    if (phase == Phase::kProb) {
      w = get_probabilities(g, result.state.term_count, result.state.term_err, prob_rules);
      check_weights(w, g);
      result.prob_weights = w;
    }
    result.state.phases.push_back(run_phase(model, g, opts, phase, w, opts.iters, result.state));
    if (phase == Phase::kRand && !diagnosed) {
      const PhaseStats& rand = result.state.phases.back();
      result.diagnosis = fault_diagnosis(rand.term_err, rand.term_count, opts.threshold);
      diagnosed = true;
    }
  }
  if (!diagnosed) {
    result.diagnosis =
        fault_diagnosis(result.state.term_err, result.state.term_count, opts.threshold);
  }
  return result;
}

std::vector<std::uint64_t> violations_by_tau(const CampaignState& state,
                                             std::span<const std::string> probes,
                                             std::span<const double> taus) {
  std::vector<std::uint64_t> out;
  for (double tau : taus) {
    std::uint64_t count = 0;
    for (const CaseOutcome& c : state.cases) {
      if (c.outputs.size() != c.test.sentences.size()) {
        throw Error(ErrorCode::kPrecondition, "campaign did not keep model outputs");
      }
      if (judge_mlm(c.outputs, probes, tau).fairness_violation) ++count;
    }
    out.push_back(count);
  }
  return out;
}

}  // namespace fairgram

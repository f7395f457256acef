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

#include "fairgram/augment.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "fairgram/derivation.h"
#include "fairgram/error.h"
#include "fairgram/generator.h"
#include "fairgram/rng.h"
#include "fairgram/weights.h"
#include "json.hpp"

namespace fairgram {

std::uint64_t augmentation_size(double percent, std::uint64_t base_size) {
  if (!(percent >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "percent must be >= 0");
  return static_cast<std::uint64_t>(std::llround(percent / 100.0 * static_cast<double>(base_size)));
}

AugmentationSet build_augmentation(const Grammar& g, const AnomalyReport& report,
                                   std::span<const LabelRule> label_rules,
                                   const AugmentOptions& opts) {
  if (opts.base_size == 0) throw Error(ErrorCode::kInvalidArgument, "base size must be positive");
  if (opts.top_k == 0) throw Error(ErrorCode::kInvalidArgument, "top-k must be positive");
  AugmentationSet set;
  set.percent = opts.percent;
  set.base_size = opts.base_size;
  set.seed = opts.seed;
  const std::uint64_t wanted = augmentation_size(opts.percent, opts.base_size);
  if (wanted == 0) return set;

  std::string rule = opts.rule;
  if (rule.empty()) {
    if (g.sensitive().size() != 1) {
      throw Error(ErrorCode::kInvalidArgument, "choose the rule to restrict");
    }
    rule = g.sensitive().front();
  }
  const std::vector<TokenDiagnosis> top = top_k_tokens(report, opts.top_k, rule);
  if (top.empty()) {
    throw Error(ErrorCode::kPrecondition, "diagnosis has no sampled tokens for '" + rule + "'");
  }

  WeightTable w = equal_prob(g);
  const auto& alts = g.alternatives(rule);
  std::vector<double> row(alts.size(), 0.0);
  std::set<std::string> sources;
  double total = 0.0;
  for (const TokenDiagnosis& t : top) {
    set.source_tokens.push_back(t.terminal);
    sources.insert(t.terminal.literal);
    for (std::size_t i = 0; i < alts.size(); ++i) {
      auto leaf = alts[i].leaf_literal();
      if (leaf && *leaf == t.terminal.literal) {
        row[i] = std::max(t.rate, kRateFloor);
        total += row[i];
      }
    }
  }
  if (total <= 0.0) {
    throw Error(ErrorCode::kPrecondition, "top tokens are not alternatives of '" + rule + "'");
  }
  for (double& x : row) x /= total;
  w.weights[rule] = std::move(row);

  std::set<std::string> seen;
  const std::uint64_t max_attempts = 100 * wanted + 10000;
  while (set.records.size() < wanted && set.attempts < max_attempts) {
    Rng rng = Rng::derive(opts.seed, Stream::kAugment, set.attempts++);
    const DerivationTrace trace = build_input(g, w, rng);
    bool on_target = false;
    for (std::size_t site : choices_of_rule(trace, rule)) {
      const auto& leaf = trace.choices[site].leaf;
      on_target = on_target || (leaf && sources.count(*leaf) != 0);
    }
    if (!on_target || seen.count(trace.sentence) != 0) continue;
    seen.insert(trace.sentence);
    auto label = predictive_label(trace.sentence, label_rules);
    if (!label) {
      ++set.unlabeled;
      continue;
    }
    set.records.push_back({trace.sentence, *label});
  }
  const std::uint64_t judged = set.records.size() + set.unlabeled;
  if (2 * set.unlabeled > judged) {
    throw Error(ErrorCode::kLabelCoverage, std::to_string(set.unlabeled) + " of " +
                                               std::to_string(judged) +
                                               " sentences matched no label rule");
  }
  if (set.records.size() < wanted) {
    throw Error(ErrorCode::kInsufficientSentences,
                "only " + std::to_string(set.records.size()) + " distinct labelled sentences of " +
                    std::to_string(wanted) + " requested");
  }
  return set;
}

std::string augmentation_jsonl(const AugmentationSet& set) {
  std::string out;
  for (const AugmentRecord& r : set.records) {
    nlohmann::ordered_json line = {{"text", r.text}, {"label", r.label}};
    out += line.dump();
    out += '\n';
  }
  return out;
}

}  // namespace fairgram

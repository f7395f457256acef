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

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "fairgram/error.h"
#include "fairgram/oracles.h"
#include "fairgram/rng.h"
#include "test_support.h"

namespace fairgram {
namespace {

TaskOutput sa(SaLabel label) { return SaOutput{label, 0.0}; }
TaskOutput mlm(double his, double her) { return MlmOutput{{{"his", his}, {"her", her}}}; }
TaskOutput coref(std::vector<Chain> chains) { return CorefOutput{std::move(chains)}; }

TEST(JudgeSa, Examples) {
  const std::vector<TaskOutput> same = {sa(SaLabel::kNegative), sa(SaLabel::kNegative)};
  const std::vector<TaskOutput> split = {sa(SaLabel::kNegative), sa(SaLabel::kPositive)};
  EXPECT_FALSE(judge_sa(same).fairness_violation);
  EXPECT_TRUE(judge_sa(split).fairness_violation);
  EXPECT_FALSE(judge_sa(same).prediction_errors.has_value());
  const std::vector<TaskOutput> wrong = {coref({})};
  EXPECT_THROW(judge_sa(wrong), Error);
}

TEST(JudgeCoref, PlaceholderComparison) {
  const std::vector<std::string> spans = {"He", "She"};
  const std::vector<TaskOutput> linked = {coref({{"the farmer", "He"}}),
                                          coref({{"the farmer", "She"}})};
  EXPECT_FALSE(judge_coref(linked, spans).fairness_violation);
  const std::vector<TaskOutput> relinked = {coref({{"the farmer", "He"}}),
                                            coref({{"the baker", "She"}})};
  EXPECT_TRUE(judge_coref(relinked, spans).fairness_violation);
  const std::vector<TaskOutput> reordered = {coref({{"a", "b"}, {"He", "c"}}),
                                             coref({{"She", "c"}, {"b", "a"}})};
  EXPECT_FALSE(judge_coref(reordered, spans).fairness_violation);
  const std::vector<std::string> one = {"He"};
  EXPECT_THROW(judge_coref(linked, one), Error);
}

TEST(JudgeMlm, TauBoundary) {
  const std::vector<std::string> probes = {"his", "her"};
  const std::vector<TaskOutput> out = {mlm(0.70, 0.18), mlm(0.52, 0.30)};
  EXPECT_TRUE(judge_mlm(out, probes, 0.10).fairness_violation);
  EXPECT_FALSE(judge_mlm(out, probes, 0.20).fairness_violation);
  EXPECT_THROW(judge_mlm(out, probes, 0.0), Error);
  EXPECT_THROW(judge_mlm(out, probes, 1.0), Error);
}

TEST(Oracles, ReflexiveAndPermutationInvariant) {
  Rng rng(17);
  std::mt19937_64 shuffle(5);
  const std::vector<std::string> probes = {"his", "her"};
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng.below(5);
    std::vector<TaskOutput> s;
    std::vector<TaskOutput> m;
    std::vector<TaskOutput> c;
    std::vector<std::string> spans;
    for (std::size_t i = 0; i < n; ++i) {
      s.push_back(sa(static_cast<SaLabel>(rng.below(3))));
      m.push_back(mlm(rng.uniform() * 0.5, rng.uniform() * 0.5));
      spans.push_back("P" + std::to_string(i));
      c.push_back(coref({{"x", rng.below(2) ? spans.back() : "y"}}));
    }
    const bool vs = judge_sa(s).fairness_violation;
    const bool vm = judge_mlm(m, probes, 0.1).fairness_violation;
    const bool vc = judge_coref(c, spans).fairness_violation;

    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), shuffle);
    std::vector<TaskOutput> s2, m2, c2;
    std::vector<std::string> spans2;
    for (std::size_t i : perm) {
      s2.push_back(s[i]);
      m2.push_back(m[i]);
      c2.push_back(c[i]);
      spans2.push_back(spans[i]);
    }
    ASSERT_EQ(judge_sa(s2).fairness_violation, vs);
    ASSERT_EQ(judge_mlm(m2, probes, 0.1).fairness_violation, vm);
    ASSERT_EQ(judge_coref(c2, spans2).fairness_violation, vc);

    const std::vector<TaskOutput> ss(n, s[0]);
    const std::vector<TaskOutput> mm(n, m[0]);
    const std::vector<TaskOutput> cc(n, coref({{"x", "y"}}));
    ASSERT_FALSE(judge_sa(ss).fairness_violation);
    ASSERT_FALSE(judge_mlm(mm, probes, 0.01).fairness_violation);
    ASSERT_FALSE(judge_coref(cc, spans).fairness_violation);
  }
}

TEST(JudgeMlm, TauMonotone) {
  Rng rng(3);
  const std::vector<std::string> probes = {"his", "her"};
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<TaskOutput> out;
    for (int i = 0; i < 2; ++i) out.push_back(mlm(rng.uniform() * 0.5, rng.uniform() * 0.5));
    bool previous = true;
    for (double tau : kTauGrid) {
      const bool v = judge_mlm(out, probes, tau).fairness_violation;
      ASSERT_TRUE(previous || !v);
      previous = v;
    }
  }
}

TEST(PredictiveLabel, Examples) {
  const std::vector<LabelRule> rules = {{"furious", "negative"},
                                        {"delighted", "positive"},
                                        {"ecstatic", "positive"}};
  EXPECT_EQ(predictive_label("The nurse feels furious.", rules), "negative");
  EXPECT_EQ(predictive_label("The nurse feels delighted and ecstatic.", rules), "positive");
  EXPECT_EQ(predictive_label("The nurse went home.", rules), std::nullopt);
  EXPECT_EQ(predictive_label("The nurse feels FURIOUS.", rules), "negative");
  EXPECT_EQ(predictive_label("The nurse feels furiousness.", rules), std::nullopt);
  try {
    predictive_label("Furious yet delighted.", rules);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kAmbiguousRules);
  }
}

TEST(PredictionErrors, Flags) {
  const std::vector<LabelRule> rules = {{"furious", "negative"}};
  const std::vector<TaskOutput> outs = {sa(SaLabel::kNegative), sa(SaLabel::kPositive),
                                        sa(SaLabel::kPositive)};
  const std::vector<std::string> sentences = {"He is furious.", "She is furious.",
                                              "She is here."};
  EXPECT_EQ(prediction_errors(outs, sentences, rules), (std::vector<bool>{false, true, false}));
}

TEST(LabelRules, GrammarAndRoundTrip) {
  const Grammar g = testing::shipped("sentiment");
  const std::vector<LabelRule> rules = label_rules_from_grammar(g);
  ASSERT_FALSE(rules.empty());
  EXPECT_EQ(parse_label_rules(dump_label_rules(rules)), rules);
  for (const LabelRule& r : rules) {
    EXPECT_TRUE(r.label == "positive" || r.label == "negative" || r.label == "neutral");
  }
  EXPECT_THROW(parse_label_rules("{}"), Error);
  EXPECT_THROW(parse_label_rules(R"([{"contains": "x"}])"), Error);
  EXPECT_THROW(parse_label_rules(R"([{"contains": "", "label": "a"}])"), Error);
}

}  // namespace
}  // namespace fairgram

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

#include <cmath>
#include <map>
#include <set>

#include "fairgram/campaign.h"
#include "fairgram/derivation.h"
#include "fairgram/error.h"
#include "fairgram/generator.h"
#include "fairgram/mut.h"
#include "fairgram/rng.h"
#include "fairgram/weights.h"
#include "test_support.h"

namespace fairgram {
namespace {

using testing::shipped;

DerivationTrace trace_with(const Grammar& g, std::vector<Choice> choices) {
  DerivationTrace t;
  t.sentence = replay(g, choices).text;
  t.choices = std::move(choices);
  return t;
}

// Forces every non-sensitive choice of the first derivation whose sentence
// contains `needle`.
DerivationTrace find_trace(const Grammar& g, const std::string& needle) {
  for (std::uint64_t i = 0; i < 100000; ++i) {
    Rng rng = Rng::derive(1, Stream::kRand, i);
    DerivationTrace t = build_input(g, equal_prob(g), rng);
    if (t.sentence.find(needle) != std::string::npos) return t;
  }
  ADD_FAILURE() << "no sentence contains " << needle;
  return {};
}

TEST(BuildInput, CorefShape) {
  const Grammar g = shipped("coref_unambiguous");
  Rng rng(1);
  const DerivationTrace t = build_input(g, equal_prob(g), rng);
  EXPECT_NO_THROW(verify_trace(g, t));
  const DerivationTrace carpenter = find_trace(g, "The carpenter was talking. He ");
  EXPECT_EQ(carpenter.sentence.substr(0, 29), "The carpenter was talking. He");
  EXPECT_EQ(carpenter.sentence.back(), '.');
}

TEST(BuildInput, DepthExceededGuard) {
  const Grammar g = shipped("mlm");
  EXPECT_LE(g.max_depth(), Grammar::kMaxDepth);
}

TEST(MutateInput, PronounSwap) {
  const Grammar g = shipped("coref_unambiguous");
  const DerivationTrace base = find_trace(g, ". He ");
  Rng rng(2);
  const auto out = mutate_input(g, base, "subj_pronoun", 1, rng);
  ASSERT_EQ(out.size(), 1u);
  std::string expected = base.sentence;
  expected.replace(expected.find(". He ") + 2, 2, "She");
  EXPECT_EQ(out[0].sentence, expected);
  EXPECT_TRUE(mutate_input(g, base, "subj_pronoun", 0, rng).empty());
  try {
    mutate_input(g, base, "subj_pronoun", 2, rng);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInsufficientAlternatives);
  }
}

TEST(MutateInput, SiteErrors) {
  const Grammar g = parse_grammar(R"({"start": "S", "rules": {
      "S": [[{"ref": "P"}, {"t": "and"}, {"ref": "P"}], [{"t": "nobody"}]],
      "P": [[{"t": "he"}], [{"t": "she"}], [{"t": "they"}]]}, "sensitive": ["P"]})");
  const DerivationTrace twice =
      trace_with(g, {{"S", 0, std::nullopt}, {"P", 0, "he"}, {"P", 1, "she"}});
  const DerivationTrace none = trace_with(g, {{"S", 1, std::nullopt}});
  Rng rng(1);
  try {
    mutate_input(g, twice, "P", 1, rng);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMultipleSensitiveSites);
  }
  try {
    mutate_input(g, none, "P", 1, rng);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingSensitiveSite);
  }
}

TEST(MutateInput, WithoutReplacementAndBias) {
  const Grammar g = shipped("sentiment");
  Rng rng(4);
  for (int i = 0; i < 200; ++i) {
    const TestCase tc = build_test(g, 5, equal_prob(g), "person", rng);
    std::set<std::string> choices(tc.sensitive_choices.begin(), tc.sensitive_choices.end());
    ASSERT_EQ(choices.size(), 5u);
    const auto allowed = g.allowed_alternatives("person");
    for (const DerivationTrace& t : tc.traces) {
      for (std::size_t site : choices_of_rule(t, "person")) {
        ASSERT_TRUE(std::count(allowed.begin(), allowed.end(), t.choices[site].alternative));
      }
    }
  }
}

TEST(MutateInput, UniformOverRemaining) {
  const Grammar g = shipped("mlm");
  Rng base_rng(1);
  const DerivationTrace base = build_input(g, equal_prob(g), base_rng);
  std::map<std::string, int> hits;
  Rng rng(8);
  const int n = 42000;
  for (int i = 0; i < n; ++i) {
    const auto out = mutate_input(g, base, "occupation", 1, rng);
    ++hits[*out[0].choices[choices_of_rule(out[0], "occupation")[0]].leaf];
  }
  EXPECT_EQ(hits.size(), 42u);
  for (const auto& [token, count] : hits) EXPECT_NEAR(count, n / 42.0, 5 * std::sqrt(n / 42.0));
}

TEST(BuildTest, Shapes) {
  const Grammar g = shipped("sentiment");
  Rng a(21);
  const TestCase pair = build_test(g, 2, equal_prob(g), "person", a);
  EXPECT_EQ(pair.sentences.size(), 2u);
  EXPECT_NE(pair.sensitive_choices[0], pair.sensitive_choices[1]);
  EXPECT_TRUE(differs_only_at_sensitive_slot(g, pair));

  Rng b(21);
  EXPECT_EQ(build_test(g, 2, equal_prob(g), "person", b), pair);

  Rng c(3);
  const TestCase single = build_test(g, 1, equal_prob(g), "person", c);
  EXPECT_EQ(single.sentences.size(), 1u);
  EXPECT_EQ(single.sensitive_choices.size(), 1u);
}

TEST(BuildTest, MutationPurityOnAllGrammars) {
  for (const std::string& name : testing::shipped_names()) {
    const Grammar g = shipped(name);
    const std::string sens = g.sensitive().front();
    for (std::uint64_t i = 0; i < 300; ++i) {
      Rng rng = Rng::derive(5, Stream::kRand, i);
      const TestCase tc = build_test(g, 2, equal_prob(g), sens, rng);
      ASSERT_TRUE(differs_only_at_sensitive_slot(g, tc)) << name << ": " << tc.sentences[0];
    }
  }
}

TEST(TokenCount, CountsOncePerSentence) {
  const Grammar g = parse_grammar(R"({"start": "S", "rules": {
      "S": [[{"ref": "P"}, {"ref": "X"}, {"ref": "X"}]],
      "P": [[{"t": "he"}], [{"t": "she"}]],
      "X": [[{"t": "x"}]]}, "sensitive": ["P"]})");
  Rng rng(1);
  const TestCase tc = build_test(g, 2, equal_prob(g), "P", rng);
  TokenCountMap m;
  update_term_count(m, g, tc);
  EXPECT_EQ(m.get({"X", "x"}), 2u);
  EXPECT_EQ(m.get({"P", "he"}), 1u);
  EXPECT_EQ(m.get({"P", "she"}), 1u);
}

TEST(GetProbabilities, FloorExample) {
  const Grammar g = parse_grammar(R"({"start": "S", "rules": {"S": [[{"ref": "P"}]],
      "P": [[{"t": "He"}], [{"t": "She"}]]}, "sensitive": ["P"]})");
  TokenCountMap count;
  TokenCountMap err;
  count.add({"P", "He"}, 100);
  count.add({"P", "She"}, 100);
  err.add({"P", "He"}, 50);
  const std::vector<std::string> rules = {"P"};
  const WeightTable w = get_probabilities(g, count, err, rules);
  EXPECT_NEAR(w.at("P")[0], 0.5 / 0.51, 1e-12);
  EXPECT_NEAR(w.at("P")[1], 0.01 / 0.51, 1e-12);
  EXPECT_NEAR(w.at("P")[0], 0.9804, 1e-4);
  EXPECT_NEAR(w.at("P")[1], 0.0196, 1e-4);
}

TEST(GetProbabilities, FallbacksAndEqualRates) {
  const Grammar g = parse_grammar(R"({"start": "S", "rules": {"S": [[{"ref": "P"}, {"ref": "Q"}]],
      "P": [[{"t": "a"}], [{"t": "b"}], [{"t": "c"}]],
      "Q": [[{"t": "x"}], [{"t": "y"}]]}, "sensitive": ["P"]})");
  const std::vector<std::string> rules = {"P"};
  TokenCountMap count;
  TokenCountMap err;
  for (const char* t : {"a", "b", "c"}) count.add({"P", t}, 10);
  EXPECT_EQ(get_probabilities(g, count, err, rules), equal_prob(g));
  for (const char* t : {"a", "b", "c"}) err.add({"P", t}, 5);
  err.add({"Q", "x"}, 5);
  count.add({"Q", "x"}, 5);
  const WeightTable w = get_probabilities(g, count, err, rules);
  for (double x : w.at("P")) EXPECT_NEAR(x, 1.0 / 3.0, 1e-12);
  EXPECT_EQ(w.at("Q"), (std::vector<double>{0.5, 0.5}));
}

TEST(GetProbabilities, ProportionalityProperty) {
  const Grammar g = shipped("mlm");
  Rng rng(77);
  const std::vector<std::string> rules = {"occupation"};
  for (int trial = 0; trial < 50; ++trial) {
    TokenCountMap count;
    TokenCountMap err;
    std::map<std::string, double> floored;
    for (const Alternative& a : g.alternatives("occupation")) {
      const std::string lit(*a.leaf_literal());
      const std::uint64_t c = rng.below(4) == 0 ? 0 : 1 + rng.below(50);
      const std::uint64_t e = c == 0 ? 0 : rng.below(c + 1);
      if (c > 0) count.add({"occupation", lit}, c);
      if (e > 0) err.add({"occupation", lit}, e);
      floored[lit] = std::max(c == 0 ? 0.0 : static_cast<double>(e) / c, 0.01);
    }
    const WeightTable w = get_probabilities(g, count, err, rules);
    check_weights(w, g);
    const auto& alts = g.alternatives("occupation");
    for (std::size_t i = 0; i < alts.size(); ++i) {
      for (std::size_t j = 0; j < alts.size(); ++j) {
        const double ratio = floored[std::string(*alts[i].leaf_literal())] /
                             floored[std::string(*alts[j].leaf_literal())];
        ASSERT_NEAR(w.at("occupation")[i] / w.at("occupation")[j], ratio, 1e-9 * ratio);
      }
    }
  }
}

CampaignOptions sa_options(std::uint64_t iters, std::uint64_t seed) {
  CampaignOptions o;
  o.n = 2;
  o.iters = iters;
  o.seed = seed;
  o.sensitive = "person";
  o.oracle.task = Task::kSa;
  return o;
}

TEST(RunPhase, ZeroIterationsIsNoop) {
  const Grammar g = shipped("sentiment");
  LexiconSa model;
  CampaignState state;
  const PhaseStats s = run_phase(model, g, sa_options(0, 1), Phase::kRand, equal_prob(g), 0, state);
  EXPECT_EQ(s.iterations, 0u);
  EXPECT_TRUE(state.s_count.empty());
  EXPECT_TRUE(state.term_count.empty());
}

TEST(RunPhase, PlantedRateRecovered) {
  const Grammar g = shipped("sentiment");
  FlipPlant plant;
  plant.flip["CEO"] = 0.6;
  LexiconSa model(plant);
  CampaignState state;
  state.seed = 3;
  CampaignOptions opts = sa_options(3000, 3);
  opts.workers = 4;
  run_phase(model, g, opts, Phase::kRand, equal_prob(g), 3000, state);
  // With one planted side the pair violates exactly when the CEO sentence flips.
  const TerminalId ceo{"person", "the CEO"};
  const double n = static_cast<double>(state.term_count.get(ceo));
  ASSERT_GT(n, 50.0);
  const double rate = static_cast<double>(state.term_err.get(ceo)) / n;
  EXPECT_NEAR(rate, 0.6, 3 * std::sqrt(0.6 * 0.4 / n));
}

TEST(RunPhase, Invariants) {
  const Grammar g = shipped("sentiment");
  FlipPlant plant;
  plant.flip["nurse"] = 0.5;
  plant.flip["Jamel"] = 0.5;
  LexiconSa model(plant);
  CampaignState state;
  state.seed = 9;
  CampaignOptions opts = sa_options(1500, 9);
  const PhaseStats s = run_phase(model, g, opts, Phase::kRand, equal_prob(g), 1500, state);
  EXPECT_LE(state.s_count.size(), 1500u);
  EXPECT_EQ(s.unique + s.duplicates, 1500u);
  for (const std::string& k : state.s_err) EXPECT_TRUE(state.s_count.count(k));
  for (const auto& [t, e] : state.term_err.entries()) EXPECT_LE(e, state.term_count.get(t));

  // Count conservation: per rule, counts sum to the distinct terminals of
  // that rule over all kept sentences.
  std::map<std::string, std::uint64_t> sums;
  for (const auto& [t, c] : state.term_count.entries()) sums[t.rule] += c;
  std::map<std::string, std::uint64_t> recount;
  for (const CaseOutcome& c : state.cases) {
    for (const DerivationTrace& t : c.test.traces) {
      const std::vector<TerminalId> seen = instantiated_terminals(g, t);
      for (const TerminalId& id : std::set<TerminalId>(seen.begin(), seen.end())) ++recount[id.rule];
    }
  }
  EXPECT_EQ(sums, recount);
}

TEST(RunPhase, SaturationStops) {
  const Grammar g = parse_grammar(R"({"start": "S", "rules": {"S": [[{"ref": "P"}, {"ref": "V"}]],
      "P": [[{"t": "he"}], [{"t": "she"}]], "V": [[{"t": "ran."}], [{"t": "sat."}]]},
      "sensitive": ["P"]})");
  LexiconSa model;
  CampaignState state;
  CampaignOptions opts = sa_options(100000, 1);
  opts.sensitive = "P";
  opts.saturation = true;
  const PhaseStats s = run_phase(model, g, opts, Phase::kRand, equal_prob(g), 100000, state);
  EXPECT_TRUE(s.saturated);
  EXPECT_EQ(s.unique, 2u);
  EXPECT_EQ(s.iterations, 1500u);
}

TEST(Campaign, FairModelHasNoViolations) {
  const Grammar g = shipped("sentiment");
  LexiconSa model;
  const CampaignResult r = run_individual_campaign(model, g, sa_options(500, 2));
  ASSERT_EQ(r.state.phases.size(), 2u);
  for (const PhaseStats& p : r.state.phases) EXPECT_EQ(p.violations, 0u);
  EXPECT_TRUE(r.diagnosis.flagged().empty());
}

TEST(Campaign, WorkerCountDoesNotMatter) {
  const Grammar g = shipped("sentiment");
  FlipPlant plant;
  plant.flip["CEO"] = 0.7;
  LexiconSa model(plant);
  CampaignOptions one = sa_options(700, 5);
  CampaignOptions many = one;
  many.workers = 8;
  const CampaignResult a = run_individual_campaign(model, g, one);
  const CampaignResult b = run_individual_campaign(model, g, many);
  EXPECT_EQ(a.state.s_count, b.state.s_count);
  EXPECT_EQ(a.state.s_err, b.state.s_err);
  EXPECT_EQ(a.state.term_count, b.state.term_count);
  EXPECT_EQ(a.state.term_err, b.state.term_err);
  EXPECT_EQ(a.prob_weights, b.prob_weights);
}

TEST(Campaign, GlobalDedupAcrossPhases) {
  const Grammar g = shipped("mlm");
  TablePlant plant;
  TableMlm model(plant);
  CampaignOptions o;
  o.iters = 2000;
  o.seed = 4;
  o.sensitive = "occupation";
  o.oracle.task = Task::kMlm;
  const CampaignResult r = run_individual_campaign(model, g, o);
  EXPECT_EQ(r.state.s_count.size(), r.state.phases[0].unique + r.state.phases[1].unique);
}

}  // namespace
}  // namespace fairgram

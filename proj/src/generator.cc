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

#include "fairgram/generator.h"

#include <algorithm>
#include <numeric>
#include <utility>

#include "fairgram/error.h"

namespace fairgram {
namespace {

void expand(const Grammar& g, const WeightTable& w, const std::string& rule, int depth,
            Rng& rng, std::vector<Choice>& out) {
  if (depth > Grammar::kMaxDepth) {
    throw Error(ErrorCode::kDepthExceeded, "expansion of '" + rule + "' passes depth " +
                                               std::to_string(Grammar::kMaxDepth));
  }
  const auto& alts = g.alternatives(rule);
  const std::size_t index = alts.size() == 1 ? 0 : sample_index(w.at(rule), rng);
  const Alternative& alt = alts[index];
  Choice choice{rule, index, std::nullopt};
  if (auto literal = alt.leaf_literal()) choice.leaf = std::string(*literal);
  out.push_back(std::move(choice));
  for (const Item& item : alt.items) {
    if (!item.is_terminal()) expand(g, w, item.value, depth + 1, rng, out);
  }
}

std::size_t single_site(const DerivationTrace& trace, std::string_view rule) {
  const std::vector<std::size_t> sites = choices_of_rule(trace, rule);
  if (sites.empty()) {
    throw Error(ErrorCode::kMissingSensitiveSite,
                "derivation never expands '" + std::string(rule) + "'");
  }
  if (sites.size() > 1) {
    throw Error(ErrorCode::kMultipleSensitiveSites,
                "derivation expands '" + std::string(rule) + "' " +
                    std::to_string(sites.size()) + " times");
  }
  return sites.front();
}

DerivationTrace with_alternative(const Grammar& g, const DerivationTrace& base, std::size_t site,
                                 std::size_t alternative) {
  DerivationTrace out = base;
  Choice& choice = out.choices[site];
  choice.alternative = alternative;
  auto literal = g.alternatives(choice.rule)[alternative].leaf_literal();
  choice.leaf = literal ? std::optional<std::string>(*literal) : std::nullopt;
  out.sentence = replay(g, out.choices).text;
  return out;
}

}  // namespace

std::string TestCase::dedup_key() const {
  std::vector<std::string> sorted = sentences;
  std::sort(sorted.begin(), sorted.end());
  std::string key;
  for (const std::string& s : sorted) {
    key += s;
    key += '\x1e';
  }
  return key;
}

std::uint64_t TokenCountMap::get(const TerminalId& terminal) const {
  auto it = counts_.find(terminal);
  return it == counts_.end() ? 0 : it->second;
}

void TokenCountMap::merge(const TokenCountMap& other) {
  for (const auto& [terminal, count] : other.counts_) counts_[terminal] += count;
}

void update_term_count(TokenCountMap& map, const Grammar& g, const TestCase& tc) {
  for (const DerivationTrace& trace : tc.traces) {
    std::vector<TerminalId> terminals = instantiated_terminals(g, trace);
    std::sort(terminals.begin(), terminals.end());
    terminals.erase(std::unique(terminals.begin(), terminals.end()), terminals.end());
    for (const TerminalId& t : terminals) map.add(t);
  }
}

DerivationTrace build_input(const Grammar& g, const WeightTable& w, Rng& rng) {
  DerivationTrace trace;
  expand(g, w, g.start(), 1, rng, trace.choices);
  trace.sentence = replay(g, trace.choices).text;
  return trace;
}

std::vector<DerivationTrace> mutate_input(const Grammar& g, const DerivationTrace& base,
                                          std::string_view sensitive, std::size_t k, Rng& rng) {
  if (k == 0) return {};
  const std::size_t site = single_site(base, sensitive);
  std::vector<std::size_t> pool;
  for (std::size_t index : g.allowed_alternatives(sensitive)) {
    if (index != base.choices[site].alternative) pool.push_back(index);
  }
  if (pool.size() < k) {
    throw Error(ErrorCode::kInsufficientAlternatives,
                "'" + std::string(sensitive) + "' offers " + std::to_string(pool.size()) +
                    " other alternatives, " + std::to_string(k) + " requested");
  }
  // Partial Fisher-Yates: the first k slots become the sample.
  std::vector<DerivationTrace> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    std::swap(pool[i], pool[i + rng.below(pool.size() - i)]);
    out.push_back(with_alternative(g, base, site, pool[i]));
  }
  return out;
}

TestCase build_test(const Grammar& g, std::size_t n, const WeightTable& w,
                    std::string_view sensitive, Rng& rng) {
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "a test case needs n >= 1");
  TestCase tc;
  tc.sensitive_rule = std::string(sensitive);
  tc.traces.push_back(build_input(g, w, rng));
  if (n > 1) {
    for (DerivationTrace& t : mutate_input(g, tc.traces.front(), sensitive, n - 1, rng)) {
      tc.traces.push_back(std::move(t));
    }
  }
  for (const DerivationTrace& t : tc.traces) {
    tc.sentences.push_back(t.sentence);
    const std::vector<std::size_t> sites = choices_of_rule(t, sensitive);
    if (sites.size() == 1 && t.choices[sites.front()].leaf) {
      tc.sensitive_choices.push_back(*t.choices[sites.front()].leaf);
    } else if (n > 1) {
      // mutate_input already rejected these shapes.
      throw Error(ErrorCode::kMissingSensitiveSite, "no sensitive leaf in derivation");
    }
  }
  return tc;
}

DerivationTrace modify_terminal(const Grammar& g, const DerivationTrace& trace,
                                std::string_view rule, std::string_view literal) {
  const std::size_t site = single_site(trace, rule);
  const auto& alts = g.alternatives(rule);
  for (std::size_t i = 0; i < alts.size(); ++i) {
    auto leaf = alts[i].leaf_literal();
    if (leaf && *leaf == literal) return with_alternative(g, trace, site, i);
  }
  throw Error(ErrorCode::kInvalidArgument,
              "rule '" + std::string(rule) + "' has no terminal '" + std::string(literal) + "'");
}

WeightTable get_probabilities(const Grammar& g, const TokenCountMap& term_count,
                              const TokenCountMap& term_err,
                              std::span<const std::string> prob_rules) {
  WeightTable w = equal_prob(g);
  for (const std::string& rule : prob_rules) {
    const auto& alts = g.alternatives(rule);
    std::vector<double> rates(alts.size(), 0.0);
    bool any_error = false;
    const std::vector<std::size_t> allowed = g.allowed_alternatives(rule);
    for (std::size_t index : allowed) {
      auto literal = alts[index].leaf_literal();
      if (!literal) continue;
      const TerminalId id{rule, std::string(*literal)};
      const std::uint64_t count = term_count.get(id);
      if (count == 0) continue;
      rates[index] = static_cast<double>(term_err.get(id)) / static_cast<double>(count);
      any_error = any_error || rates[index] > 0.0;
    }
    if (!any_error) continue;
    std::vector<double> row(alts.size(), 0.0);
    double total = 0.0;
    for (std::size_t index : allowed) {
      row[index] = std::max(rates[index], kRateFloor);
      total += row[index];
    }
    for (double& x : row) x /= total;
    w.weights[rule] = std::move(row);
  }
  return w;
}

bool differs_only_at_sensitive_slot(const Grammar& g, const TestCase& tc) {
  std::string reference;
  for (std::size_t i = 0; i < tc.traces.size(); ++i) {
    const DerivationTrace& trace = tc.traces[i];
    const std::size_t site = single_site(trace, tc.sensitive_rule);
    std::vector<Choice> blanked = trace.choices;
    blanked[site].alternative = 0;
    blanked[site].leaf.reset();
    const std::string text = replay(g, blanked).text;
    if (i == 0) {
      reference = text;
    } else if (text != reference) {
      return false;
    }
  }
  return true;
}

}  // namespace fairgram

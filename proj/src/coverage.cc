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

#include "fairgram/coverage.h"

#include <map>
#include <set>
#include <utility>

namespace fairgram {

CoverageReport coverage(std::span<const DerivationTrace> traces, const Grammar& g) {
  CoverageReport report;
  const std::vector<TerminalId>& universe = g.terminals();
  report.terminals_total = universe.size();

  // Terminals per rule, to count the pair universe without enumerating it.
  std::map<std::string_view, std::size_t> per_rule;
  for (const TerminalId& t : universe) ++per_rule[t.rule];
  std::size_t sensitive_terminals = 0;
  std::size_t same_rule_sensitive = 0;
  for (const std::string& rule : g.sensitive()) {
    const std::size_t k = per_rule[rule];
    sensitive_terminals += k;
    report.pairs_total += k * (universe.size() - k);
    same_rule_sensitive += k * k;
  }
  // Pairs of two sensitive terminals from different rules were counted twice.
  report.pairs_total -= (sensitive_terminals * sensitive_terminals - same_rule_sensitive) / 2;

  std::set<TerminalId> covered;
  std::set<std::pair<TerminalId, TerminalId>> pairs;
  for (const DerivationTrace& trace : traces) {
    verify_trace(g, trace);
    std::vector<TerminalId> seen = instantiated_terminals(g, trace);
    covered.insert(seen.begin(), seen.end());
    for (const TerminalId& a : seen) {
      if (!g.is_sensitive(a.rule)) continue;
      for (const TerminalId& b : seen) {
        if (a.rule == b.rule) continue;
        pairs.insert(a < b ? std::pair{a, b} : std::pair{b, a});
      }
    }
  }
  report.terminals_covered = covered.size();
  report.pairs_covered = pairs.size();
  return report;
}

}  // namespace fairgram

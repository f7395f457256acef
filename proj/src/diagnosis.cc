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

#include "fairgram/diagnosis.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "fairgram/error.h"

namespace fairgram {

double median(std::span<const double> xs) {
  if (xs.empty()) throw Error(ErrorCode::kEmptyInput, "median of an empty list");
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  if (sorted.size() % 2 == 1) return sorted[mid];
  return (sorted[mid - 1] + sorted[mid]) / 2.0;
}

double mad(std::span<const double> xs) {
  const double m = median(xs);
  std::vector<double> dev;
  dev.reserve(xs.size());
  for (double x : xs) dev.push_back(std::fabs(x - m));
  return median(dev);
}

std::vector<double> anomaly_indices(std::span<const double> xs) {
  const double m = median(xs);
  const double d = mad(xs);
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> out;
  out.reserve(xs.size());
  for (double x : xs) {
    if (d > 0.0) {
      out.push_back((x - m) / d);
    } else if (x == m) {
      out.push_back(0.0);
    } else {
      out.push_back(x > m ? kInf : -kInf);
    }
  }
  return out;
}

std::vector<TerminalId> AnomalyReport::flagged() const {
  std::vector<TerminalId> out;
  for (const TokenDiagnosis& t : tokens) {
    if (t.flagged) out.push_back(t.terminal);
  }
  return out;
}

AnomalyReport fault_diagnosis(const TokenCountMap& term_err, const TokenCountMap& term_count,
                              double threshold) {
  if (!(threshold > 0.0)) throw Error(ErrorCode::kInvalidArgument, "threshold must be positive");
  AnomalyReport report;
  report.threshold = threshold;
  std::map<std::string, std::vector<TokenDiagnosis>> by_rule;
  for (const auto& [terminal, count] : term_count.entries()) {
    if (count == 0) continue;
    const std::uint64_t err = term_err.get(terminal);
    if (err > count) {
      throw Error(ErrorCode::kPrecondition,
                  "error count exceeds count for '" + terminal.literal + "'");
    }
    TokenDiagnosis t;
    t.terminal = terminal;
    t.count = count;
    t.err = err;
    t.rate = static_cast<double>(err) / static_cast<double>(count);
    by_rule[terminal.rule].push_back(std::move(t));
  }
  for (auto& [rule, tokens] : by_rule) {
    if (tokens.size() < kMinSampledTerminals) {
      report.insufficient_rules.push_back(rule);
    } else {
      std::vector<double> rates;
      for (const TokenDiagnosis& t : tokens) rates.push_back(t.rate);
      const std::vector<double> idx = anomaly_indices(rates);
      for (std::size_t i = 0; i < tokens.size(); ++i) {
        tokens[i].index = idx[i];
        tokens[i].flagged = std::fabs(idx[i]) > threshold;
      }
    }
    for (TokenDiagnosis& t : tokens) report.tokens.push_back(std::move(t));
  }
  return report;
}

std::vector<TokenDiagnosis> top_k_tokens(const AnomalyReport& report, std::size_t k,
                                         const std::optional<std::string>& rule) {
  std::vector<TokenDiagnosis> pool;
  for (const TokenDiagnosis& t : report.tokens) {
    if (!rule || t.terminal.rule == *rule) pool.push_back(t);
  }
  std::stable_sort(pool.begin(), pool.end(), [](const TokenDiagnosis& a, const TokenDiagnosis& b) {
    if (a.rate != b.rate) return a.rate > b.rate;
    if (a.count != b.count) return a.count > b.count;
    return a.terminal.literal < b.terminal.literal;
  });
  if (pool.size() > k) pool.resize(k);
  return pool;
}

}  // namespace fairgram

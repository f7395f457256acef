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

#include "fairgram/weights.h"

#include <cmath>

#include "fairgram/error.h"

namespace fairgram {

const std::vector<double>& WeightTable::at(std::string_view rule) const {
  auto it = weights.find(rule);
  if (it == weights.end()) {
    throw Error(ErrorCode::kInvalidArgument, "no weights for rule '" + std::string(rule) + "'");
  }
  return it->second;
}

WeightTable equal_prob(const Grammar& g) {
  WeightTable w;
  for (const auto& [rule, alts] : g.rules()) {
    std::vector<double> row(alts.size(), 0.0);
    const std::vector<std::size_t> allowed = g.allowed_alternatives(rule);
    for (std::size_t index : allowed) row[index] = 1.0 / static_cast<double>(allowed.size());
    w.weights.emplace(rule, std::move(row));
  }
  return w;
}

void check_weights(const WeightTable& w, const Grammar& g) {
  for (const auto& [rule, alts] : g.rules()) {
    const std::vector<double>& row = w.at(rule);
    if (row.size() != alts.size()) {
      throw Error(ErrorCode::kInvalidArgument, "weight row for '" + rule + "' has wrong length");
    }
    double sum = 0.0;
    for (double x : row) {
      if (!(x >= 0.0)) {
        throw Error(ErrorCode::kInvalidArgument, "negative weight for '" + rule + "'");
      }
      sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw Error(ErrorCode::kInvalidArgument, "weights for '" + rule + "' do not sum to 1");
    }
  }
}

std::size_t sample_index(std::span<const double> weights, Rng& rng) {
  double total = 0.0;
  for (double x : weights) total += x;
  const double target = rng.uniform() * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    acc += weights[i];
    last_positive = i;
    if (target < acc) return i;
  }
  // Rounding can leave target == acc; fall back to the last selectable entry.
  return last_positive;
}

}  // namespace fairgram

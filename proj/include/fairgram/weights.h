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
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fairgram/grammar.h"
#include "fairgram/rng.h"

namespace fairgram {

// Per-rule selection probabilities, one weight per alternative.
struct WeightTable {
  std::map<std::string, std::vector<double>, std::less<>> weights;

  // Throws kInvalidArgument if `rule` has no entry.
  const std::vector<double>& at(std::string_view rule) const;

  bool operator==(const WeightTable&) const = default;
};

// Uniform weights over each rule's alternatives; bias-masked alternatives get
// zero and the allowed ones share the mass equally.
WeightTable equal_prob(const Grammar& g);

// Throws kInvalidArgument unless every rule of `g` has a normalized,
// non-negative row of the right length.
void check_weights(const WeightTable& w, const Grammar& g);

// Draws an index with probability proportional to `weights`.
std::size_t sample_index(std::span<const double> weights, Rng& rng);

}  // namespace fairgram

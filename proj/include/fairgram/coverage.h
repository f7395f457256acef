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
#include <span>

#include "fairgram/derivation.h"
#include "fairgram/grammar.h"

namespace fairgram {

// Grammar coverage of a set of generated sentences. A pair is an unordered
// combination of a sensitive-rule terminal with a terminal of any other rule
// that appear in the same sentence.
struct CoverageReport {
  std::size_t terminals_covered = 0;
  std::size_t terminals_total = 0;
  std::size_t pairs_covered = 0;
  std::size_t pairs_total = 0;

  double terminal_ratio() const {
    return terminals_total == 0 ? 0.0
                                : static_cast<double>(terminals_covered) / terminals_total;
  }
  double pair_ratio() const {
    return pairs_total == 0 ? 0.0 : static_cast<double>(pairs_covered) / pairs_total;
  }
  bool operator==(const CoverageReport&) const = default;
};

// Throws kTraceMismatch if any trace does not replay against `g`.
CoverageReport coverage(std::span<const DerivationTrace> traces, const Grammar& g);

}  // namespace fairgram

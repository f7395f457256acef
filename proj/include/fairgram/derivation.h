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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fairgram/grammar.h"

namespace fairgram {

// One rule expansion, recorded in pre-order.
struct Choice {
  std::string rule;
  std::size_t alternative = 0;
  std::optional<std::string> leaf;  // set when the alternative is one terminal

  bool operator==(const Choice&) const = default;
};

struct DerivationTrace {
  std::vector<Choice> choices;
  std::string sentence;

  bool operator==(const DerivationTrace&) const = default;
};

// Where one instantiated terminal landed in the rendered sentence.
struct Segment {
  TerminalId terminal;
  std::size_t choice = 0;  // index of the owning Choice
  std::size_t begin = 0;
  std::size_t end = 0;
};

struct Rendering {
  std::string text;
  std::vector<Segment> segments;
};

// Replays choices against `g`. Throws kTraceMismatch when a choice names the
// wrong rule, an invalid alternative, or when choices are left over or missing.
Rendering replay(const Grammar& g, std::span<const Choice> choices);

// Literals are joined by single spaces, except that literals starting with
// sentence punctuation attach to the previous one. `capitalize` upper-cases the
// first character.
std::string join_literals(std::span<const std::string> literals, bool capitalize = false);

// Throws kTraceMismatch unless the trace replays to its own sentence.
void verify_trace(const Grammar& g, const DerivationTrace& trace);

// Terminals instantiated by the trace, in sentence order (with repeats).
std::vector<TerminalId> instantiated_terminals(const Grammar& g, const DerivationTrace& trace);

// Indices of choices that expand `rule`.
std::vector<std::size_t> choices_of_rule(const DerivationTrace& trace, std::string_view rule);

}  // namespace fairgram

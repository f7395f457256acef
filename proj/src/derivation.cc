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

#include "fairgram/derivation.h"

#include <cctype>

#include "fairgram/error.h"

namespace fairgram {
namespace {

bool attaches_left(const std::string& literal) {
  static constexpr std::string_view kPunctuation = ".,;:!?";
  return !literal.empty() && kPunctuation.find(literal.front()) != std::string_view::npos;
}

class Replayer {
 public:
  Replayer(const Grammar& g, std::span<const Choice> choices) : g_(g), choices_(choices) {}

  Rendering run() {
    expand(g_.start(), 1);
    if (next_ != choices_.size()) {
      throw Error(ErrorCode::kTraceMismatch,
                  std::to_string(choices_.size() - next_) + " unused choices after replay");
    }
    Rendering out;
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
      if (i > 0 && !attaches_left(pieces_[i].terminal.literal)) out.text += ' ';
      Segment seg = pieces_[i];
      seg.begin = out.text.size();
      out.text += seg.terminal.literal;
      seg.end = out.text.size();
      out.segments.push_back(std::move(seg));
    }
    if (g_.capitalize() && !out.text.empty()) {
      out.text[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out.text[0])));
    }
    return out;
  }

 private:
  void expand(const std::string& rule, int depth) {
    if (depth > Grammar::kMaxDepth) {
      throw Error(ErrorCode::kTraceMismatch, "replay exceeds the depth limit");
    }
    if (next_ >= choices_.size()) {
      throw Error(ErrorCode::kTraceMismatch, "trace ends before rule '" + rule + "'");
    }
    const std::size_t index = next_++;
    const Choice& choice = choices_[index];
    if (choice.rule != rule) {
      throw Error(ErrorCode::kTraceMismatch,
                  "expected rule '" + rule + "' but trace has '" + choice.rule + "'");
    }
    const auto& alts = g_.alternatives(rule);
    if (choice.alternative >= alts.size()) {
      throw Error(ErrorCode::kTraceMismatch, "rule '" + rule + "' has no alternative " +
                                                 std::to_string(choice.alternative));
    }
    const Alternative& alt = alts[choice.alternative];
    if (choice.leaf) {
      auto literal = alt.leaf_literal();
      if (!literal || *literal != *choice.leaf) {
        throw Error(ErrorCode::kTraceMismatch, "leaf literal mismatch in rule '" + rule + "'");
      }
    }
    for (const Item& item : alt.items) {
      if (item.is_terminal()) {
        pieces_.push_back(Segment{TerminalId{rule, item.value}, index, 0, 0});
      } else {
        expand(item.value, depth + 1);
      }
    }
  }

  const Grammar& g_;
  std::span<const Choice> choices_;
  std::size_t next_ = 0;
  std::vector<Segment> pieces_;
};

}  // namespace

Rendering replay(const Grammar& g, std::span<const Choice> choices) {
  return Replayer(g, choices).run();
}

std::string join_literals(std::span<const std::string> literals, bool capitalize) {
  std::string text;
  for (std::size_t i = 0; i < literals.size(); ++i) {
    if (i > 0 && !attaches_left(literals[i])) text += ' ';
    text += literals[i];
  }
  if (capitalize && !text.empty()) {
    text[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(text[0])));
  }
  return text;
}

void verify_trace(const Grammar& g, const DerivationTrace& trace) {
  const Rendering r = replay(g, trace.choices);
  if (r.text != trace.sentence) {
    throw Error(ErrorCode::kTraceMismatch,
                "trace renders \"" + r.text + "\" but records \"" + trace.sentence + "\"");
  }
}

std::vector<TerminalId> instantiated_terminals(const Grammar& g, const DerivationTrace& trace) {
  std::vector<TerminalId> out;
  for (Segment& seg : replay(g, trace.choices).segments) out.push_back(std::move(seg.terminal));
  return out;
}

std::vector<std::size_t> choices_of_rule(const DerivationTrace& trace, std::string_view rule) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < trace.choices.size(); ++i) {
    if (trace.choices[i].rule == rule) out.push_back(i);
  }
  return out;
}

}  // namespace fairgram

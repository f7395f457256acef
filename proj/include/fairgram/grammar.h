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

#include <compare>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fairgram {

// One element on the right-hand side of a production.
struct Item {
  enum class Kind { kRef, kTerminal };

  Kind kind = Kind::kTerminal;
  std::string value;  // rule name for kRef, literal for kTerminal

  bool is_terminal() const { return kind == Kind::kTerminal; }
  bool operator==(const Item&) const = default;
};

struct Alternative {
  std::vector<Item> items;

  // The literal when this alternative is exactly one terminal.
  std::optional<std::string_view> leaf_literal() const {
    if (items.size() == 1 && items.front().is_terminal()) return items.front().value;
    return std::nullopt;
  }
  bool operator==(const Alternative&) const = default;
};

// A terminal is identified by the rule it appears in and its literal; the
// same literal under two rules is two terminals.
struct TerminalId {
  std::string rule;
  std::string literal;

  auto operator<=>(const TerminalId&) const = default;
};

using RuleMap = std::map<std::string, std::vector<Alternative>, std::less<>>;

// Annotated context-free grammar. Immutable once built; all invariants are
// checked by the factory functions below.
class Grammar {
 public:
  static constexpr int kMaxDepth = 64;

  const std::string& start() const { return start_; }
  const RuleMap& rules() const { return rules_; }
  bool has_rule(std::string_view rule) const { return rules_.find(rule) != rules_.end(); }

  // Throws kUnresolvedRef for unknown rules.
  const std::vector<Alternative>& alternatives(std::string_view rule) const;

  const std::vector<std::string>& sensitive() const { return sensitive_; }
  bool is_sensitive(std::string_view rule) const;

  // Bias masks: rule -> allowed alternative indices (ascending).
  const std::map<std::string, std::vector<std::size_t>, std::less<>>& bias() const {
    return bias_;
  }
  // Indices selectable for `rule` after bias masking.
  std::vector<std::size_t> allowed_alternatives(std::string_view rule) const;

  const std::vector<std::string>& prob_rules() const { return prob_rules_; }

  // Optional rule -> label annotations used to derive predictive-oracle rules.
  const std::map<std::string, std::string, std::less<>>& labels() const { return labels_; }

  // Every distinct terminal, in (rule, literal) order.
  const std::vector<TerminalId>& terminals() const { return terminals_; }

  // Whether rendering upper-cases the first character of a sentence.
  bool capitalize() const { return capitalize_; }

  // Longest possible chain of nested rule expansions from start.
  int max_depth() const { return max_depth_; }

  // Copy with a replaced bias mask; the result is validated again.
  Grammar with_bias(std::map<std::string, std::vector<std::size_t>, std::less<>> bias) const;
  // Copy with replaced prob_rules; the result is validated again.
  Grammar with_prob_rules(std::vector<std::string> prob_rules) const;

  friend Grammar parse_grammar(std::string_view source);

 private:
  void validate();

  std::string start_;
  RuleMap rules_;
  std::vector<std::string> sensitive_;
  std::map<std::string, std::vector<std::size_t>, std::less<>> bias_;
  std::vector<std::string> prob_rules_;
  std::map<std::string, std::string, std::less<>> labels_;
  std::vector<TerminalId> terminals_;
  int max_depth_ = 0;
  bool capitalize_ = false;
};

// Parses and validates a grammar document. Errors: kSchemaError,
// kUnresolvedRef, kSensitiveArity, kRecursionError.
Grammar parse_grammar(std::string_view source);

// Reads a grammar file; kIo if it cannot be read.
Grammar load_grammar(const std::filesystem::path& path);

}  // namespace fairgram

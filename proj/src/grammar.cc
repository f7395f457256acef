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

#include "fairgram/grammar.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "fairgram/error.h"
#include "json.hpp"

namespace fairgram {
namespace {

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& message) {
  throw Error(ErrorCode::kSchemaError, message);
}

std::vector<std::string> parse_name_list(const json& doc, const char* key) {
  std::vector<std::string> names;
  if (!doc.contains(key)) return names;
  const json& list = doc.at(key);
  if (!list.is_array()) schema_error(std::string("'") + key + "' must be an array");
  for (const json& entry : list) {
    if (!entry.is_string()) schema_error(std::string("'") + key + "' entries must be strings");
    names.push_back(entry.get<std::string>());
  }
  return names;
}

Item parse_item(const json& node, const std::string& rule) {
  if (!node.is_object() || node.size() != 1) {
    schema_error("rule '" + rule + "': item must be {\"ref\": ...} or {\"t\": ...}");
  }
  Item item;
  if (node.contains("ref")) {
    item.kind = Item::Kind::kRef;
    if (!node["ref"].is_string()) schema_error("rule '" + rule + "': ref must be a string");
    item.value = node["ref"].get<std::string>();
  } else if (node.contains("t")) {
    item.kind = Item::Kind::kTerminal;
    if (!node["t"].is_string()) schema_error("rule '" + rule + "': literal must be a string");
    item.value = node["t"].get<std::string>();
    if (item.value.empty()) schema_error("rule '" + rule + "': empty terminal literal");
  } else {
    schema_error("rule '" + rule + "': unknown item key");
  }
  return item;
}

}  // namespace

const std::vector<Alternative>& Grammar::alternatives(std::string_view rule) const {
  auto it = rules_.find(rule);
  if (it == rules_.end()) {
    throw Error(ErrorCode::kUnresolvedRef, "unknown rule '" + std::string(rule) + "'");
  }
  return it->second;
}

bool Grammar::is_sensitive(std::string_view rule) const {
  return std::find(sensitive_.begin(), sensitive_.end(), rule) != sensitive_.end();
}

std::vector<std::size_t> Grammar::allowed_alternatives(std::string_view rule) const {
  if (auto it = bias_.find(rule); it != bias_.end()) return it->second;
  std::vector<std::size_t> all(alternatives(rule).size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return all;
}

Grammar Grammar::with_bias(
    std::map<std::string, std::vector<std::size_t>, std::less<>> bias) const {
  Grammar copy = *this;
  copy.bias_ = std::move(bias);
  copy.validate();
  return copy;
}

Grammar Grammar::with_prob_rules(std::vector<std::string> prob_rules) const {
  Grammar copy = *this;
  copy.prob_rules_ = std::move(prob_rules);
  copy.validate();
  return copy;
}

void Grammar::validate() {
  if (!has_rule(start_)) {
    throw Error(ErrorCode::kUnresolvedRef, "start rule '" + start_ + "' is not defined");
  }
  std::set<TerminalId> terminals;
  for (const auto& [name, alts] : rules_) {
    if (alts.empty()) schema_error("rule '" + name + "' has no alternatives");
    for (const Alternative& alt : alts) {
      if (alt.items.empty()) schema_error("rule '" + name + "' has an empty alternative");
      for (const Item& item : alt.items) {
        if (item.is_terminal()) {
          terminals.insert({name, item.value});
        } else if (!has_rule(item.value)) {
          throw Error(ErrorCode::kUnresolvedRef,
                      "rule '" + name + "' references undefined rule '" + item.value + "'");
        }
      }
    }
  }
  terminals_.assign(terminals.begin(), terminals.end());

  for (auto& [rule, allowed] : bias_) {
    if (!has_rule(rule)) {
      throw Error(ErrorCode::kUnresolvedRef, "bias names undefined rule '" + rule + "'");
    }
    std::sort(allowed.begin(), allowed.end());
    allowed.erase(std::unique(allowed.begin(), allowed.end()), allowed.end());
    if (allowed.empty()) schema_error("bias for '" + rule + "' allows no alternative");
    if (allowed.back() >= rules_.find(rule)->second.size()) {
      schema_error("bias for '" + rule + "' names a missing alternative");
    }
  }

  for (const std::string& rule : sensitive_) {
    if (!has_rule(rule)) {
      throw Error(ErrorCode::kUnresolvedRef, "sensitive names undefined rule '" + rule + "'");
    }
    const auto& alts = rules_.find(rule)->second;
    std::set<std::string_view> literals;
    for (const Alternative& alt : alts) {
      auto literal = alt.leaf_literal();
      if (!literal) {
        schema_error("sensitive rule '" + rule + "' must have single-terminal alternatives");
      }
      if (!literals.insert(*literal).second) {
        schema_error("sensitive rule '" + rule + "' repeats literal '" + std::string(*literal) +
                     "'");
      }
    }
    if (alts.size() < 2 || allowed_alternatives(rule).size() < 2) {
      throw Error(ErrorCode::kSensitiveArity,
                  "sensitive rule '" + rule + "' needs at least two selectable alternatives");
    }
  }

  for (const std::string& rule : prob_rules_) {
    if (!has_rule(rule)) {
      throw Error(ErrorCode::kUnresolvedRef, "prob_rules names undefined rule '" + rule + "'");
    }
  }
  for (const auto& [rule, label] : labels_) {
    if (!has_rule(rule)) {
      throw Error(ErrorCode::kUnresolvedRef, "labels names undefined rule '" + rule + "'");
    }
    if (label.empty()) schema_error("empty label for rule '" + rule + "'");
  }

  // Depth of every rule; any cycle makes derivations unbounded.
  enum class Mark { kNew, kActive, kDone };
  std::map<std::string_view, Mark> marks;
  std::map<std::string_view, int> depth;
  std::function<int(std::string_view)> visit = [&](std::string_view rule) -> int {
    Mark& mark = marks[rule];
    if (mark == Mark::kDone) return depth[rule];
    if (mark == Mark::kActive) {
      throw Error(ErrorCode::kRecursionError,
                  "rule '" + std::string(rule) + "' is recursive; derivations are unbounded");
    }
    mark = Mark::kActive;
    int deepest = 0;
    for (const Alternative& alt : rules_.find(rule)->second) {
      for (const Item& item : alt.items) {
        if (!item.is_terminal()) deepest = std::max(deepest, visit(item.value));
      }
    }
    marks[rule] = Mark::kDone;
    return depth[rule] = deepest + 1;
  };
  for (const auto& entry : rules_) visit(entry.first);
  max_depth_ = depth[start_];
  if (max_depth_ > kMaxDepth) {
    throw Error(ErrorCode::kRecursionError, "derivations can reach depth " +
                                                std::to_string(max_depth_) + " (limit " +
                                                std::to_string(kMaxDepth) + ")");
  }
}

Grammar parse_grammar(std::string_view source) {
  json doc;
  try {
    doc = json::parse(source.begin(), source.end());
  } catch (const json::parse_error& e) {
    schema_error(std::string("malformed grammar document: ") + e.what());
  }
  if (!doc.is_object()) schema_error("grammar document must be an object");
  static const std::set<std::string> kKnownKeys = {"start", "rules", "sensitive",
                                                   "bias", "prob_rules", "labels",
                                                   "capitalize"};
  for (const auto& [key, value] : doc.items()) {
    if (!kKnownKeys.contains(key)) schema_error("unknown top-level key '" + key + "'");
  }
  if (!doc.contains("start") || !doc["start"].is_string()) {
    schema_error("'start' must be a string");
  }
  if (!doc.contains("rules") || !doc["rules"].is_object() || doc["rules"].empty()) {
    schema_error("'rules' must be a non-empty object");
  }

  Grammar g;
  g.start_ = doc["start"].get<std::string>();
  for (const auto& [name, alts] : doc["rules"].items()) {
    if (!alts.is_array()) schema_error("rule '" + name + "' must be an array of alternatives");
    std::vector<Alternative>& parsed = g.rules_[name];
    for (const json& alt : alts) {
      if (!alt.is_array()) schema_error("rule '" + name + "': alternative must be an array");
      Alternative a;
      for (const json& node : alt) a.items.push_back(parse_item(node, name));
      parsed.push_back(std::move(a));
    }
  }
  g.sensitive_ = parse_name_list(doc, "sensitive");
  {
    std::set<std::string> seen(g.sensitive_.begin(), g.sensitive_.end());
    if (seen.size() != g.sensitive_.size()) schema_error("'sensitive' repeats a rule");
  }
  if (doc.contains("bias")) {
    if (!doc["bias"].is_object()) schema_error("'bias' must be an object");
    for (const auto& [rule, indices] : doc["bias"].items()) {
      if (!indices.is_array()) schema_error("bias for '" + rule + "' must be an array");
      auto& allowed = g.bias_[rule];
      for (const json& index : indices) {
        if (!index.is_number_unsigned()) {
          schema_error("bias for '" + rule + "' must list non-negative indices");
        }
        allowed.push_back(index.get<std::size_t>());
      }
    }
  }
  if (doc.contains("prob_rules")) {
    g.prob_rules_ = parse_name_list(doc, "prob_rules");
  } else {
    g.prob_rules_ = g.sensitive_;
  }
  if (doc.contains("labels")) {
    if (!doc["labels"].is_object()) schema_error("'labels' must be an object");
    for (const auto& [rule, label] : doc["labels"].items()) {
      if (!label.is_string()) schema_error("label for '" + rule + "' must be a string");
      g.labels_[rule] = label.get<std::string>();
    }
  }
  if (doc.contains("capitalize")) {
    if (!doc["capitalize"].is_boolean()) schema_error("'capitalize' must be a boolean");
    g.capitalize_ = doc["capitalize"].get<bool>();
  }
  g.validate();
  return g;
}

Grammar load_grammar(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read grammar file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_grammar(buffer.str());
}

}  // namespace fairgram

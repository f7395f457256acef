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

#include "fairgram/oracles.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "fairgram/error.h"
#include "fairgram/text.h"

namespace fairgram {
namespace {

constexpr std::string_view kPlaceholder = "\x1f<sensitive>";

template <typename T>
const T& expect(const TaskOutput& out, std::string_view task) {
  const T* value = std::get_if<T>(&out);
  if (value == nullptr) {
    throw Error(ErrorCode::kTaskMismatch, "expected a " + std::string(task) + " output");
  }
  return *value;
}

std::set<std::multiset<std::string>> normalized_chains(const CorefOutput& out,
                                                       const std::string& sensitive) {
  std::set<std::multiset<std::string>> chains;
  for (const Chain& chain : out.chains) {
    std::multiset<std::string> spans;
    for (const std::string& span : chain) {
      spans.insert(span == sensitive ? std::string(kPlaceholder) : span);
    }
    chains.insert(std::move(spans));
  }
  return chains;
}

}  // namespace

Verdict judge_sa(std::span<const TaskOutput> outputs) {
  Verdict v;
  v.detail.assign(outputs.begin(), outputs.end());
  for (const TaskOutput& out : outputs) {
    const SaLabel label = expect<SaOutput>(out, "sa").label;
    if (label != expect<SaOutput>(outputs.front(), "sa").label) v.fairness_violation = true;
  }
  return v;
}

Verdict judge_coref(std::span<const TaskOutput> outputs,
                    std::span<const std::string> sensitive_spans) {
  if (sensitive_spans.size() != outputs.size()) {
    throw Error(ErrorCode::kInvalidArgument, "one sensitive span per coref output required");
  }
  Verdict v;
  v.detail.assign(outputs.begin(), outputs.end());
  std::optional<std::set<std::multiset<std::string>>> reference;
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    auto chains = normalized_chains(expect<CorefOutput>(outputs[i], "coref"), sensitive_spans[i]);
    if (!reference) {
      reference = std::move(chains);
    } else if (chains != *reference) {
      v.fairness_violation = true;
    }
  }
  return v;
}

Verdict judge_mlm(std::span<const TaskOutput> outputs, std::span<const std::string> probes,
                  double tau) {
  if (!(tau > 0.0 && tau < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "tau must lie in (0, 1)");
  }
  Verdict v;
  v.detail.assign(outputs.begin(), outputs.end());
  for (const std::string& probe : probes) {
    double lo = INFINITY;
    double hi = -INFINITY;
    for (const TaskOutput& out : outputs) {
      const auto& conf = expect<MlmOutput>(out, "mlm").confidences;
      auto it = conf.find(probe);
      const double c = it == conf.end() ? 0.0 : it->second;
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
    if (!outputs.empty() && hi - lo > tau) v.fairness_violation = true;
  }
  return v;
}

std::optional<std::string> predictive_label(std::string_view sentence,
                                            std::span<const LabelRule> rules) {
  std::optional<std::string> found;
  std::string matched;
  for (const LabelRule& rule : rules) {
    if (!contains_word(sentence, rule.contains)) continue;
    if (!found) {
      found = rule.label;
      matched = rule.contains;
    } else if (*found != rule.label) {
      throw Error(ErrorCode::kAmbiguousRules, "'" + matched + "' (" + *found + ") and '" +
                                                  rule.contains + "' (" + rule.label +
                                                  ") both match \"" + std::string(sentence) +
                                                  "\"");
    }
  }
  return found;
}

std::vector<LabelRule> label_rules_from_grammar(const Grammar& g) {
  std::vector<LabelRule> rules;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& [rule, label] : g.labels()) {
    for (const Alternative& alt : g.alternatives(rule)) {
      for (const Item& item : alt.items) {
        if (item.is_terminal() && seen.emplace(item.value, label).second) {
          rules.push_back({item.value, label});
        }
      }
    }
  }
  return rules;
}

std::vector<LabelRule> parse_label_rules(std::string_view source) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(source);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchemaError, std::string("label rules: ") + e.what());
  }
  if (!doc.is_array()) throw Error(ErrorCode::kSchemaError, "label rules must be a list");
  std::vector<LabelRule> rules;
  for (const auto& entry : doc) {
    if (!entry.is_object() || !entry.contains("contains") || !entry.contains("label") ||
        !entry["contains"].is_string() || !entry["label"].is_string()) {
      throw Error(ErrorCode::kSchemaError,
                  "label rule needs string fields \"contains\" and \"label\"");
    }
    rules.push_back({entry["contains"].get<std::string>(), entry["label"].get<std::string>()});
    if (rules.back().contains.empty()) {
      throw Error(ErrorCode::kSchemaError, "label rule with empty \"contains\"");
    }
  }
  return rules;
}

std::vector<LabelRule> load_label_rules(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_label_rules(buf.str());
}

std::string dump_label_rules(std::span<const LabelRule> rules) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const LabelRule& r : rules) {
    doc.push_back({{"contains", r.contains}, {"label", r.label}});
  }
  return doc.dump(2) + "\n";
}

std::vector<bool> prediction_errors(std::span<const TaskOutput> outputs,
                                    std::span<const std::string> sentences,
                                    std::span<const LabelRule> rules) {
  if (outputs.size() != sentences.size()) {
    throw Error(ErrorCode::kInvalidArgument, "one sentence per output required");
  }
  std::vector<bool> errors;
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    const SaLabel got = expect<SaOutput>(outputs[i], "sa").label;
    const auto want = predictive_label(sentences[i], rules);
    errors.push_back(want.has_value() && *want != sa_label_name(got));
  }
  return errors;
}

}  // namespace fairgram

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

#include "fairgram/config.h"

#include <fstream>
#include <sstream>

#include "fairgram/error.h"

namespace fairgram {
namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& message) {
  throw Error(ErrorCode::kSchemaError, "config: " + message);
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_relative() ? base / path : path;
}

std::vector<std::string> strings(const json& value, const std::string& key) {
  if (!value.is_array()) bad("\"" + key + "\" must be a list of strings");
  std::vector<std::string> out;
  for (const json& v : value) {
    if (!v.is_string()) bad("\"" + key + "\" must be a list of strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::uint64_t count(const json& value, const std::string& key) {
  if (!value.is_number_unsigned() &&
      !(value.is_number_integer() && value.get<std::int64_t>() >= 0)) {
    bad("\"" + key + "\" must be a non-negative integer");
  }
  return value.get<std::uint64_t>();
}

double real(const json& value, const std::string& key) {
  if (!value.is_number()) bad("\"" + key + "\" must be a number");
  return value.get<double>();
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

CampaignConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    bad(e.what());
  }
  if (!doc.is_object()) bad("top level must be an object");
  CampaignConfig c;
  for (const auto& [key, value] : doc.items()) {
    if (key == "grammar_path") {
      if (!value.is_string()) bad("\"grammar_path\" must be a string");
      c.grammar_ref = value.get<std::string>();
      c.grammar_path = resolve(base_dir, c.grammar_ref);
    } else if (key == "task") {
      if (!value.is_string()) bad("\"task\" must be a string");
      c.task = parse_task(value.get<std::string>());
    } else if (key == "n") {
      c.n = count(value, key);
      if (c.n == 0) bad("\"n\" must be at least 1");
    } else if (key == "iters") {
      c.iters = count(value, key);
    } else if (key == "seed") {
      c.seed = count(value, key);
    } else if (key == "tau") {
      c.tau = real(value, key);
      if (!(c.tau > 0.0 && c.tau < 1.0)) bad("\"tau\" must lie in (0, 1)");
    } else if (key == "phases") {
      c.phases.clear();
      for (const std::string& p : strings(value, key)) c.phases.push_back(parse_phase(p));
    } else if (key == "mut") {
      if (!value.is_object()) bad("\"mut\" must be an object");
      c.mut = parse_mut_spec(value.dump(), base_dir);
      c.mut_echo = nlohmann::ordered_json::parse(value.dump());
    } else if (key == "prob_rules") {
      c.prob_rules = strings(value, key);
    } else if (key == "bias") {
      if (!value.is_object()) bad("\"bias\" must map rules to index lists");
      std::map<std::string, std::vector<std::size_t>, std::less<>> bias;
      for (const auto& [rule, list] : value.items()) {
        if (!list.is_array()) bad("bias for '" + rule + "' must be a list");
        for (const json& i : list) bias[rule].push_back(count(i, "bias"));
      }
      c.bias = std::move(bias);
    } else if (key == "sensitive") {
      if (!value.is_string()) bad("\"sensitive\" must be a string");
      c.sensitive = value.get<std::string>();
    } else if (key == "threshold") {
      c.threshold = real(value, key);
      if (!(c.threshold > 0.0)) bad("\"threshold\" must be positive");
    } else if (key == "saturation") {
      if (!value.is_boolean()) bad("\"saturation\" must be a boolean");
      c.saturation = value.get<bool>();
    } else if (key == "label_rules") {
      if (!value.is_string()) bad("\"label_rules\" must be a path");
      c.label_rules_ref = value.get<std::string>();
      c.label_rules = resolve(base_dir, c.label_rules_ref);
    } else if (key == "iters_per_group") {
      c.iters_per_group = count(value, key);
    } else if (key == "probes") {
      c.probes = strings(value, key);
    } else {
      bad("unknown key \"" + key + "\"");
    }
  }
  return c;
}

CampaignConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_text_file(path), path.parent_path());
}

void set_mut_from_file(CampaignConfig& config, const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  config.mut = parse_mut_spec(text, path.parent_path());
  try {
    config.mut_echo = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchemaError, std::string("mut spec: ") + e.what());
  }
}

Grammar load_config_grammar(const CampaignConfig& config) {
  if (config.grammar_path.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no grammar given (--grammar or grammar_path)");
  }
  Grammar g = load_grammar(config.grammar_path);
  if (config.bias) g = g.with_bias(*config.bias);
  if (!config.prob_rules.empty()) g = g.with_prob_rules(config.prob_rules);
  return g;
}

CampaignOptions campaign_options(const CampaignConfig& config, const Grammar& g,
                                 std::size_t workers) {
  CampaignOptions o;
  o.n = config.n;
  o.iters = config.iters;
  o.seed = config.seed;
  o.workers = workers;
  o.sensitive = resolve_sensitive(g, config.sensitive);
  o.prob_rules = g.prob_rules();
  o.phases = config.phases;
  o.threshold = config.threshold;
  o.saturation = config.saturation;
  o.oracle.task = config.task;
  o.oracle.tau = config.tau;
  o.oracle.probes = config.probes;
  if (config.label_rules) {
    if (config.task != Task::kSa) {
      throw Error(ErrorCode::kInvalidArgument, "label rules apply to sentiment campaigns only");
    }
    o.oracle.label_rules = load_label_rules(*config.label_rules);
  }
  return o;
}

nlohmann::ordered_json config_echo(const CampaignConfig& c) {
  nlohmann::ordered_json echo;
  echo["grammar_path"] = c.grammar_ref;
  echo["task"] = task_name(c.task);
  echo["n"] = c.n;
  echo["iters"] = c.iters;
  echo["seed"] = c.seed;
  if (c.task == Task::kMlm) {
    echo["tau"] = c.tau;
    echo["probes"] = c.probes;
  }
  echo["phases"] = nlohmann::ordered_json::array();
  for (Phase p : c.phases) echo["phases"].push_back(phase_name(p));
  echo["sensitive"] = c.sensitive;
  echo["prob_rules"] = c.prob_rules;
  if (c.bias) {
    nlohmann::ordered_json bias = nlohmann::ordered_json::object();
    for (const auto& [rule, list] : *c.bias) bias[rule] = list;
    echo["bias"] = bias;
  }
  echo["threshold"] = c.threshold;
  echo["saturation"] = c.saturation;
  if (c.label_rules) echo["label_rules"] = c.label_rules_ref;
  echo["mut"] = c.mut_echo;
  return echo;
}

}  // namespace fairgram

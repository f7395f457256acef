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

#include "fairgram/mut.h"

#include <algorithm>
#include <array>
#include <fstream>
#include <set>
#include <sstream>

#include "fairgram/parallel.h"
#include "fairgram/rng.h"
#include "fairgram/text.h"
#include "json.hpp"

namespace fairgram {
namespace {

using nlohmann::json;

constexpr std::array<std::string_view, 10> kPositiveWords = {
    "ecstatic", "excited", "glad", "happy", "relieved",
    "amazing", "funny", "great", "hilarious", "wonderful"};

constexpr std::array<std::string_view, 30> kNegativeWords = {
    "angry",       "annoyed",    "enraged",   "furious",       "irritated",
    "annoying",    "displeasing", "irritating", "outrageous",   "vexing",
    "anxious",     "discouraged", "fearful",   "scared",        "terrified",
    "dreadful",    "horrible",   "shocking",  "terrifying",    "threatening",
    "depressed",   "devastated", "disappointed", "miserable",   "sad",
    "depressing",  "gloomy",     "grim",      "heartbreaking", "serious"};

constexpr std::array<std::string_view, 8> kPronouns = {"he",  "she",  "they", "him",
                                                       "her", "them", "his",  "their"};

[[noreturn]] void protocol_error(const std::string& message) {
  throw Error(ErrorCode::kMutProtocol, message);
}

json parse_json(std::string_view text, ErrorCode code, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(code, std::string(what) + ": " + e.what());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

double probability(const json& value, const std::string& what) {
  if (!value.is_number()) throw Error(ErrorCode::kSchemaError, what + " must be a number");
  const double p = value.get<double>();
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::kSchemaError, what + " outside [0, 1]");
  return p;
}

std::pair<double, double> his_her(const json& value, const std::string& what) {
  if (!value.is_array() || value.size() != 2) {
    throw Error(ErrorCode::kSchemaError, what + " must be [his, her]");
  }
  std::pair<double, double> out{probability(value[0], what), probability(value[1], what)};
  if (out.first + out.second > 1.0 + 1e-12) {
    throw Error(ErrorCode::kSchemaError, what + ": his + her exceeds 1");
  }
  return out;
}

FlipPlant flip_plant_from(const json& doc) {
  FlipPlant plant;
  if (!doc.is_object()) throw Error(ErrorCode::kSchemaError, "plant must be an object");
  for (const auto& [key, value] : doc.items()) {
    if (key == "flip") {
      if (!value.is_object()) throw Error(ErrorCode::kSchemaError, "\"flip\" must be an object");
      for (const auto& [token, p] : value.items()) {
        plant.flip[token] = probability(p, "flip probability of '" + token + "'");
      }
    } else if (key == "pronouns") {
      if (!value.is_array()) throw Error(ErrorCode::kSchemaError, "\"pronouns\" must be a list");
      for (const json& p : value) {
        if (!p.is_string()) throw Error(ErrorCode::kSchemaError, "pronouns must be strings");
        plant.pronouns.push_back(p.get<std::string>());
      }
    } else {
      throw Error(ErrorCode::kSchemaError, "unknown plant key '" + key + "'");
    }
  }
  return plant;
}

TablePlant table_plant_from(const json& doc) {
  TablePlant plant;
  if (!doc.is_object()) throw Error(ErrorCode::kSchemaError, "plant must be an object");
  for (const auto& [key, value] : doc.items()) {
    if (key == "default") {
      plant.fallback = his_her(value, "default");
    } else if (key == "table") {
      if (!value.is_object()) throw Error(ErrorCode::kSchemaError, "\"table\" must be an object");
      for (const auto& [token, pair] : value.items()) plant.table[token] = his_her(pair, token);
    } else {
      throw Error(ErrorCode::kSchemaError, "unknown plant key '" + key + "'");
    }
  }
  return plant;
}

bool plant_fires(const std::map<std::string, double>& flip, std::string_view text,
                 std::string_view token) {
  auto it = flip.find(std::string(token));
  return it != flip.end() && plant_draw(text, token) < it->second;
}

std::uint64_t parse_id(const json& doc) {
  if (!doc.contains("id") || !doc["id"].is_number_integer() ||
      (doc["id"].is_number_integer() && !doc["id"].is_number_unsigned() &&
       doc["id"].get<std::int64_t>() < 0)) {
    protocol_error("\"id\" must be a non-negative integer");
  }
  return doc["id"].get<std::uint64_t>();
}

}  // namespace

nlohmann::json output_to_json(const TaskOutput& out) {
  if (const auto* sa = std::get_if<SaOutput>(&out)) {
    return {{"label", sa_label_name(sa->label)}, {"score", sa->score}};
  }
  if (const auto* coref = std::get_if<CorefOutput>(&out)) {
    json chains = json::array();
    for (const Chain& chain : coref->chains) chains.push_back(chain);
    return chains;
  }
  const auto& mlm = std::get<MlmOutput>(out);
  json conf = json::object();
  for (const auto& [token, c] : mlm.confidences) conf[token] = c;
  return conf;
}

TaskOutput output_from_json(Task task, const nlohmann::json& payload) {
  TaskOutput result;
  try {
    switch (task) {
      case Task::kSa: {
        if (!payload.is_object() || !payload.contains("label") || !payload["label"].is_string() ||
            !payload.contains("score") || !payload["score"].is_number()) {
          protocol_error("\"sa\" needs a string label and a numeric score");
        }
        result = SaOutput{parse_sa_label(payload["label"].get<std::string>()),
                          payload["score"].get<double>()};
        break;
      }
      case Task::kCoref: {
        if (!payload.is_array()) protocol_error("\"coref\" must be a list of chains");
        CorefOutput out;
        for (const json& chain : payload) {
          if (!chain.is_array()) protocol_error("a chain must be a list of spans");
          Chain c;
          for (const json& span : chain) {
            if (!span.is_string()) protocol_error("spans must be strings");
            c.push_back(span.get<std::string>());
          }
          out.chains.push_back(std::move(c));
        }
        result = std::move(out);
        break;
      }
      case Task::kMlm: {
        if (!payload.is_object()) protocol_error("\"mlm\" must be an object");
        MlmOutput out;
        for (const auto& [token, c] : payload.items()) {
          if (!c.is_number()) protocol_error("confidences must be numbers");
          out.confidences[token] = c.get<double>();
        }
        result = std::move(out);
        break;
      }
    }
    validate_output(result);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kMutProtocol) throw;
    protocol_error(e.what());
  }
  return result;
}

std::string_view mut_kind_name(MutKind kind) {
  switch (kind) {
    case MutKind::kLexiconSa: return "builtin-lexicon-sa";
    case MutKind::kTableMlm: return "builtin-table-mlm";
    case MutKind::kToyCoref: return "builtin-toy-coref";
    case MutKind::kSubprocess: return "subprocess";
    case MutKind::kHttp: return "http";
  }
  return "?";
}

double plant_draw(std::string_view text, std::string_view token) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
  };
  feed(text);
  h ^= 0xff;
  h *= 0x100000001b3ULL;
  feed(token);
  return static_cast<double>(mix64(h) >> 11) * 0x1.0p-53;
}

FlipPlant parse_flip_plant(const std::string& text) {
  return flip_plant_from(parse_json(text, ErrorCode::kSchemaError, "plant"));
}

TablePlant parse_table_plant(const std::string& text) {
  return table_plant_from(parse_json(text, ErrorCode::kSchemaError, "plant"));
}

MutSpec parse_mut_spec(const std::string& text, const std::filesystem::path& base_dir) {
  const json doc = parse_json(text, ErrorCode::kSchemaError, "mut spec");
  if (!doc.is_object() || !doc.contains("kind") || !doc["kind"].is_string()) {
    throw Error(ErrorCode::kSchemaError, "mut spec needs a string \"kind\"");
  }
  MutSpec spec;
  const std::string kind = doc["kind"].get<std::string>();
  bool known = false;
  for (MutKind k : {MutKind::kLexiconSa, MutKind::kTableMlm, MutKind::kToyCoref,
                    MutKind::kSubprocess, MutKind::kHttp}) {
    if (kind == mut_kind_name(k)) {
      spec.kind = k;
      known = true;
    }
  }
  if (!known) throw Error(ErrorCode::kSchemaError, "unknown mut kind '" + kind + "'");

  for (const auto& [key, value] : doc.items()) {
    if (key == "kind") continue;
    if (key == "plant") {
      json plant = value;
      if (value.is_string()) {
        std::filesystem::path path = value.get<std::string>();
        if (path.is_relative()) path = base_dir / path;
        plant = parse_json(read_file(path), ErrorCode::kSchemaError, "plant");
      }
      if (spec.kind == MutKind::kTableMlm) {
        spec.table_plant = table_plant_from(plant);
      } else {
        spec.flip_plant = flip_plant_from(plant);
      }
    } else if (key == "command" && value.is_string()) {
      spec.command = value.get<std::string>();
    } else if (key == "url" && value.is_string()) {
      spec.url = value.get<std::string>();
    } else if (key == "timeout_ms" && value.is_number()) {
      const double ms = value.get<double>();
      if (!(ms > 0)) throw Error(ErrorCode::kSchemaError, "timeout_ms must be positive");
      spec.timeout = std::chrono::milliseconds(static_cast<std::int64_t>(ms));
      if (spec.timeout.count() == 0) spec.timeout = std::chrono::milliseconds(1);
    } else if (key == "max_in_flight" && value.is_number_integer()) {
      if (value.get<std::int64_t>() < 1) {
        throw Error(ErrorCode::kSchemaError, "max_in_flight must be at least 1");
      }
      spec.max_in_flight = value.get<std::size_t>();
    } else {
      throw Error(ErrorCode::kSchemaError, "bad mut spec field '" + key + "'");
    }
  }
  spec.working_dir = base_dir;
  if (spec.kind == MutKind::kSubprocess && spec.command.empty()) {
    throw Error(ErrorCode::kSchemaError, "subprocess mut needs \"command\"");
  }
  if (spec.kind == MutKind::kHttp && spec.url.empty()) {
    throw Error(ErrorCode::kSchemaError, "http mut needs \"url\"");
  }
  return spec;
}

LexiconSa::LexiconSa(FlipPlant plant) : plant_(std::move(plant)) {}

SaOutput LexiconSa::lexicon_label(std::string_view text) {
  int positive = 0;
  int negative = 0;
  for (const std::string& w : words(to_lower(text))) {
    if (std::find(kPositiveWords.begin(), kPositiveWords.end(), w) != kPositiveWords.end()) {
      ++positive;
    }
    if (std::find(kNegativeWords.begin(), kNegativeWords.end(), w) != kNegativeWords.end()) {
      ++negative;
    }
  }
  if (positive > negative) return {SaLabel::kPositive, 0.8};
  if (negative > positive) return {SaLabel::kNegative, -0.8};
  return {SaLabel::kNeutral, 0.0};
}

TaskOutput LexiconSa::evaluate(const Query& query) {
  if (query.task != Task::kSa) throw Error(ErrorCode::kTaskMismatch, "lexicon model is SA only");
  SaOutput out = lexicon_label(query.text);
  for (const auto& [token, p] : plant_.flip) {
    if (!contains_word(query.text, token) || plant_draw(query.text, token) >= p) continue;
    // Neutral flips to negative.
    out = out.label == SaLabel::kNegative ? SaOutput{SaLabel::kPositive, 0.6}
                                          : SaOutput{SaLabel::kNegative, -0.6};
    break;
  }
  return out;
}

TableMlm::TableMlm(TablePlant plant) : plant_(std::move(plant)) {}

TaskOutput TableMlm::evaluate(const Query& query) {
  if (query.task != Task::kMlm) throw Error(ErrorCode::kTaskMismatch, "table model is MLM only");
  std::pair<double, double> conf = plant_.fallback;
  for (const std::string& w : words(query.text)) {
    auto it = plant_.table.find(w);
    if (it != plant_.table.end()) {
      conf = it->second;
      break;
    }
  }
  MlmOutput out;
  out.confidences["his"] = conf.first;
  out.confidences["her"] = conf.second;
  return out;
}

ToyCoref::ToyCoref(FlipPlant plant) : plant_(std::move(plant)) {}

TaskOutput ToyCoref::evaluate(const Query& query) {
  if (query.task != Task::kCoref) throw Error(ErrorCode::kTaskMismatch, "toy model is coref only");
  const std::vector<std::string> ws = words(query.text);
  std::vector<std::string> nouns;
  std::optional<std::string> pronoun;
  for (std::size_t i = 0; i < ws.size(); ++i) {
    const std::string w = to_lower(ws[i]);
    if (w == "the" && i + 1 < ws.size()) nouns.push_back(ws[i + 1]);
    if (!pronoun && std::find(kPronouns.begin(), kPronouns.end(), w) != kPronouns.end()) {
      pronoun = ws[i];
    }
  }
  CorefOutput out;
  if (!pronoun || nouns.empty()) return out;
  std::string target = nouns.front();
  const bool pronoun_planted =
      plant_.pronouns.empty() ||
      std::find(plant_.pronouns.begin(), plant_.pronouns.end(), *pronoun) != plant_.pronouns.end();
  if (nouns.size() > 1 && pronoun_planted) {
    const std::string& key = plant_.flip.count(nouns[0]) != 0 ? nouns[0] : nouns[1];
    if (plant_fires(plant_.flip, query.text, key)) target = nouns[1];
  }
  out.chains.push_back({target, *pronoun});
  return out;
}

std::unique_ptr<Model> make_model(const MutSpec& spec) {
  switch (spec.kind) {
    case MutKind::kLexiconSa: return std::make_unique<LexiconSa>(spec.flip_plant);
    case MutKind::kTableMlm: return std::make_unique<TableMlm>(spec.table_plant);
    case MutKind::kToyCoref: return std::make_unique<ToyCoref>(spec.flip_plant);
    case MutKind::kSubprocess:
      return std::make_unique<SubprocessModel>(spec.command, spec.timeout, spec.max_in_flight,
                                               spec.working_dir);
    case MutKind::kHttp:
      return std::make_unique<HttpModel>(spec.url, spec.timeout, spec.max_in_flight);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown mut kind");
}

std::vector<EvalResult> batch_evaluate(Model& model, std::span<const Query> queries,
                                       std::size_t workers) {
  std::vector<EvalResult> results(queries.size());
  parallel_for(queries.size(), std::min(workers, model.max_in_flight()), [&](std::size_t i) {
    try {
      results[i].output = model.evaluate(queries[i]);
    } catch (const Error& e) {
      if (!is_mut_error(e.code()) && e.code() != ErrorCode::kMutUnavailable) throw;
      results[i].error = e;
    }
  });
  return results;
}

std::string encode_request(std::uint64_t id, const Query& query) {
  json doc = {{"id", id}, {"task", task_name(query.task)}, {"text", query.text}};
  if (!query.probes.empty()) doc["probes"] = query.probes;
  return doc.dump();
}

std::pair<std::uint64_t, Query> decode_request(std::string_view line) {
  const json doc = parse_json(line, ErrorCode::kMutProtocol, "request");
  if (!doc.is_object()) protocol_error("request must be an object");
  Query q;
  const std::uint64_t id = parse_id(doc);
  if (!doc.contains("task") || !doc["task"].is_string()) protocol_error("request needs \"task\"");
  if (!doc.contains("text") || !doc["text"].is_string()) protocol_error("request needs \"text\"");
  try {
    q.task = parse_task(doc["task"].get<std::string>());
  } catch (const Error& e) {
    protocol_error(e.what());
  }
  q.text = doc["text"].get<std::string>();
  if (doc.contains("probes")) {
    if (!doc["probes"].is_array()) protocol_error("\"probes\" must be a list");
    for (const json& p : doc["probes"]) {
      if (!p.is_string()) protocol_error("probes must be strings");
      q.probes.push_back(p.get<std::string>());
    }
  }
  return {id, std::move(q)};
}

std::string encode_response(const Response& response) {
  json doc = {{"id", response.id}};
  if (!response.output) {
    doc["error"] = response.error;
  } else {
    doc[std::string(task_name(task_of(*response.output)))] = output_to_json(*response.output);
  }
  return doc.dump();
}

Response decode_response(std::string_view line) {
  const json doc = parse_json(line, ErrorCode::kMutProtocol, "response");
  if (!doc.is_object()) protocol_error("response must be an object");
  Response r;
  r.id = parse_id(doc);
  int payloads = 0;
  for (const char* key : {"sa", "coref", "mlm", "error"}) payloads += doc.contains(key) ? 1 : 0;
  if (payloads != 1) protocol_error("response needs exactly one of sa, coref, mlm, error");
  if (doc.contains("error")) {
    if (!doc["error"].is_string()) protocol_error("\"error\" must be a string");
    r.error = doc["error"].get<std::string>();
    return r;
  }
  for (Task task : {Task::kSa, Task::kCoref, Task::kMlm}) {
    const std::string key(task_name(task));
    if (doc.contains(key)) r.output = output_from_json(task, doc[key]);
  }
  return r;
}

}  // namespace fairgram

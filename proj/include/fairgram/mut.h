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

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fairgram/error.h"
#include "fairgram/task.h"
#include "json.hpp"

namespace fairgram {

enum class MutKind { kLexiconSa, kTableMlm, kToyCoref, kSubprocess, kHttp };

std::string_view mut_kind_name(MutKind kind);

// Plant for the lexicon SA and toy coref models: literal -> flip probability.
// `pronouns`, when non-empty, limits coref flips to sentences whose pronoun
// is listed.
struct FlipPlant {
  std::map<std::string, double> flip;
  std::vector<std::string> pronouns;
};

// Plant for the table MLM: occupation -> (his, her).
struct TablePlant {
  std::pair<double, double> fallback{0.5, 0.5};
  std::map<std::string, std::pair<double, double>> table;
};

struct MutSpec {
  MutKind kind = MutKind::kLexiconSa;
  FlipPlant flip_plant;
  TablePlant table_plant;
  std::string command;  // subprocess
  std::filesystem::path working_dir;  // subprocess; the spec file's directory
  std::string url;      // http, e.g. http://127.0.0.1:8080
  std::chrono::milliseconds timeout{10000};
  std::size_t max_in_flight = 4;
};

// Accepts {"kind": ..., "plant": <object or path>, "command", "url",
// "timeout_ms", "max_in_flight"}. Relative plant paths resolve against
// `base_dir`.
MutSpec parse_mut_spec(const std::string& json, const std::filesystem::path& base_dir);
FlipPlant parse_flip_plant(const std::string& json);
TablePlant parse_table_plant(const std::string& json);

struct Query {
  Task task = Task::kSa;
  std::string text;
  std::vector<std::string> probes;  // MLM only

  bool operator==(const Query&) const = default;
};

class Model {
 public:
  virtual ~Model() = default;

  // Throws Error with a MUT error code on adapter failure.
  virtual TaskOutput evaluate(const Query& query) = 0;

  virtual std::optional<Task> task() const { return std::nullopt; }
  // Concurrent evaluate() calls allowed.
  virtual std::size_t max_in_flight() const { return 1; }
};

class LexiconSa final : public Model {
 public:
  explicit LexiconSa(FlipPlant plant = {});
  TaskOutput evaluate(const Query& query) override;
  std::optional<Task> task() const override { return Task::kSa; }
  std::size_t max_in_flight() const override { return 64; }

  // Unplanted label.
  static SaOutput lexicon_label(std::string_view text);

 private:
  FlipPlant plant_;
};

class TableMlm final : public Model {
 public:
  explicit TableMlm(TablePlant plant);
  TaskOutput evaluate(const Query& query) override;
  std::optional<Task> task() const override { return Task::kMlm; }
  std::size_t max_in_flight() const override { return 64; }

 private:
  TablePlant plant_;
};

// Antecedent is the first "the <noun>" phrase, distractor the second; a
// planted antecedent can pull the pronoun onto the distractor.
class ToyCoref final : public Model {
 public:
  explicit ToyCoref(FlipPlant plant = {});
  TaskOutput evaluate(const Query& query) override;
  std::optional<Task> task() const override { return Task::kCoref; }
  std::size_t max_in_flight() const override { return 64; }

 private:
  FlipPlant plant_;
};

// Speaks the line protocol to a pool of `/bin/sh -c command` processes.
// Crashed workers are restarted at most kMaxRestarts times over the
// adapter's lifetime; after that every call fails with kMutUnavailable.
class SubprocessModel final : public Model {
 public:
  static constexpr int kMaxRestarts = 3;

  SubprocessModel(std::string command, std::chrono::milliseconds timeout,
                  std::size_t max_in_flight, std::filesystem::path working_dir = {});
  ~SubprocessModel() override;
  SubprocessModel(const SubprocessModel&) = delete;
  SubprocessModel& operator=(const SubprocessModel&) = delete;

  TaskOutput evaluate(const Query& query) override;
  std::size_t max_in_flight() const override;
  int restarts() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// POST <url>/evaluate; bearer token taken from ASTRAEA_MUT_TOKEN when set.
class HttpModel final : public Model {
 public:
  HttpModel(std::string url, std::chrono::milliseconds timeout, std::size_t max_in_flight);
  ~HttpModel() override;

  TaskOutput evaluate(const Query& query) override;
  std::size_t max_in_flight() const override { return max_in_flight_; }

 private:
  std::string url_;
  std::chrono::milliseconds timeout_;
  std::size_t max_in_flight_;
  std::string token_;
  std::atomic<std::uint64_t> next_id_{0};
  std::mutex mu_;
  std::condition_variable cv_;
  std::size_t in_flight_ = 0;
};

std::unique_ptr<Model> make_model(const MutSpec& spec);

struct EvalResult {
  std::optional<TaskOutput> output;
  std::optional<Error> error;

  bool ok() const { return output.has_value(); }
};

// Order-preserving; at most min(workers, model.max_in_flight()) calls in
// flight. MUT errors are captured per item, anything else propagates.
std::vector<EvalResult> batch_evaluate(Model& model, std::span<const Query> queries,
                                       std::size_t workers);

// Line protocol.
std::string encode_request(std::uint64_t id, const Query& query);
std::pair<std::uint64_t, Query> decode_request(std::string_view line);

struct Response {
  std::uint64_t id = 0;
  std::optional<TaskOutput> output;
  std::string error;  // set when the MUT reported {"error": ...}

  bool operator==(const Response&) const = default;
};

std::string encode_response(const Response& response);
// Throws kMutProtocol on malformed input.
Response decode_response(std::string_view line);

// Task payloads as used on the wire and in artifacts. Decoding throws
// kMutProtocol.
nlohmann::json output_to_json(const TaskOutput& out);
TaskOutput output_from_json(Task task, const nlohmann::json& payload);

// Deterministic uniform [0, 1) keyed by (text, token).
double plant_draw(std::string_view text, std::string_view token);

}  // namespace fairgram

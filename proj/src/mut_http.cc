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

#include <cstdlib>

#include "fairgram/mut.h"
#include "httplib.h"

namespace fairgram {

HttpModel::HttpModel(std::string url, std::chrono::milliseconds timeout,
                     std::size_t max_in_flight)
    : url_(std::move(url)), timeout_(timeout), max_in_flight_(max_in_flight) {
  if (timeout.count() <= 0 || max_in_flight == 0) {
    throw Error(ErrorCode::kInvalidArgument, "timeout and max_in_flight must be positive");
  }
  if (const char* token = std::getenv("ASTRAEA_MUT_TOKEN")) token_ = token;
}

HttpModel::~HttpModel() = default;

TaskOutput HttpModel::evaluate(const Query& query) {
  {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return in_flight_ < max_in_flight_; });
    ++in_flight_;
  }
  struct Slot {
    HttpModel* self;
    ~Slot() {
      {
        std::lock_guard lock(self->mu_);
        --self->in_flight_;
      }
      self->cv_.notify_one();
    }
  } slot{this};

  std::string base = url_;
  std::string prefix;
  if (auto scheme = base.find("://"); scheme != std::string::npos) {
    if (auto slash = base.find('/', scheme + 3); slash != std::string::npos) {
      prefix = base.substr(slash);
      base.resize(slash);
    }
  }
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();

  httplib::Client client(base);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());
  if (!token_.empty()) client.set_bearer_token_auth(token_);

  const std::uint64_t id = next_id_++;
  auto res = client.Post(prefix + "/evaluate", encode_request(id, query), "application/json");
  if (!res) {
    const auto err = res.error();
    if (err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout) {
      throw Error(ErrorCode::kMutTimeout, "http: " + httplib::to_string(err));
    }
    throw Error(ErrorCode::kMutHttp, "http: " + httplib::to_string(err));
  }
  if (res->status != 200) {
    throw Error(ErrorCode::kMutHttp, "http status " + std::to_string(res->status));
  }
  const Response r = decode_response(res->body);
  if (r.id != id) throw Error(ErrorCode::kMutProtocol, "reply id does not match request");
  if (!r.output) throw Error(ErrorCode::kMutProtocol, "model reported: " + r.error);
  if (task_of(*r.output) != query.task) {
    throw Error(ErrorCode::kMutProtocol, "reply is for a different task");
  }
  return *r.output;
}

}  // namespace fairgram

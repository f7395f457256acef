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

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <condition_variable>
#include <cstring>
#include <mutex>
#include <thread>

#include "fairgram/mut.h"

extern char** environ;

namespace fairgram {
namespace {

using Clock = std::chrono::steady_clock;

struct Worker {
  pid_t pid = -1;
  int in = -1;   // child's stdin
  int out = -1;  // child's stdout
  std::string buffer;
  bool busy = false;

  bool alive() const { return pid > 0; }
};

void close_fd(int& fd) {
  if (fd >= 0) ::close(fd);
  fd = -1;
}

// Waits up to `grace` for the child to exit, then kills it. Returns the
// wait status.
int reap(pid_t pid, std::chrono::milliseconds grace) {
  int status = 0;
  const auto deadline = Clock::now() + grace;
  for (;;) {
    const pid_t r = ::waitpid(pid, &status, WNOHANG);
    if (r == pid || (r < 0 && errno != EINTR)) return status;
    if (Clock::now() >= deadline) break;
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  ::kill(pid, SIGKILL);
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  return status;
}

void stop(Worker& w, std::chrono::milliseconds grace) {
  if (!w.alive()) return;
  close_fd(w.in);
  close_fd(w.out);
  reap(w.pid, grace);
  w.pid = -1;
  w.buffer.clear();
}

}  // namespace

struct SubprocessModel::Impl {
  std::string command;
  std::filesystem::path working_dir;
  std::chrono::milliseconds timeout;
  std::vector<Worker> workers;
  std::mutex mu;
  std::condition_variable cv;
  int restarts = 0;
  std::uint64_t next_id = 0;

  void spawn(Worker& w) {
    int to_child[2];
    int from_child[2];
    if (::pipe2(to_child, O_CLOEXEC) != 0) {
      throw Error(ErrorCode::kMutUnavailable, std::string("pipe: ") + std::strerror(errno));
    }
    if (::pipe2(from_child, O_CLOEXEC) != 0) {
      ::close(to_child[0]);
      ::close(to_child[1]);
      throw Error(ErrorCode::kMutUnavailable, std::string("pipe: ") + std::strerror(errno));
    }
    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, to_child[0], STDIN_FILENO);
    posix_spawn_file_actions_adddup2(&actions, from_child[1], STDOUT_FILENO);
    posix_spawn_file_actions_addopen(&actions, STDERR_FILENO, "/dev/null", O_WRONLY, 0);
    if (!working_dir.empty()) {
      posix_spawn_file_actions_addchdir_np(&actions, working_dir.c_str());
    }
    const char* argv[] = {"/bin/sh", "-c", command.c_str(), nullptr};
    pid_t pid = -1;
    const int rc = ::posix_spawn(&pid, "/bin/sh", &actions, nullptr,
                                 const_cast<char* const*>(argv), environ);
    posix_spawn_file_actions_destroy(&actions);
    ::close(to_child[0]);
    ::close(from_child[1]);
    if (rc != 0) {
      ::close(to_child[1]);
      ::close(from_child[0]);
      throw Error(ErrorCode::kMutUnavailable, std::string("spawn: ") + std::strerror(rc));
    }
    w.pid = pid;
    w.in = to_child[1];
    w.out = from_child[0];
    w.buffer.clear();
  }

  // Claims an idle worker, starting or restarting it as needed.
  Worker& acquire() {
    std::unique_lock lock(mu);
    for (;;) {
      for (Worker& w : workers) {
        if (w.busy) continue;
        if (!w.alive()) {
          if (w.pid == 0) {
            if (restarts >= kMaxRestarts) {
              throw Error(ErrorCode::kMutUnavailable,
                          "model crashed after " + std::to_string(kMaxRestarts) + " restarts");
            }
            ++restarts;
          }
          spawn(w);
        }
        w.busy = true;
        return w;
      }
      cv.wait(lock);
    }
  }

  void release(Worker& w, bool failed) {
    if (failed) {
      stop(w, std::chrono::milliseconds(0));
      w.pid = 0;  // marks a crashed slot; respawning it counts as a restart
    }
    {
      std::lock_guard lock(mu);
      w.busy = false;
    }
    cv.notify_one();
  }

  [[noreturn]] void fail_exited(Worker& w) {
    close_fd(w.in);
    close_fd(w.out);
    const int status = reap(w.pid, std::chrono::milliseconds(1000));
    w.pid = -1;
    if (WIFEXITED(status) && WEXITSTATUS(status) == 0) {
      throw Error(ErrorCode::kMutProtocol, "model closed its output");
    }
    const std::string how = WIFEXITED(status)
                                ? "exit status " + std::to_string(WEXITSTATUS(status))
                                : "signal " + std::to_string(WTERMSIG(status));
    throw Error(ErrorCode::kMutNonZeroExit, "model terminated with " + how);
  }

  std::string roundtrip(Worker& w, const std::string& request) {
    const auto deadline = Clock::now() + timeout;
    const std::string line = request + "\n";
    std::size_t sent = 0;
    while (sent < line.size()) {
      const ssize_t n = ::write(w.in, line.data() + sent, line.size() - sent);
      if (n < 0) {
        if (errno == EINTR) continue;
        fail_exited(w);
      }
      sent += static_cast<std::size_t>(n);
    }
    for (;;) {
      if (auto nl = w.buffer.find('\n'); nl != std::string::npos) {
        std::string reply = w.buffer.substr(0, nl);
        w.buffer.erase(0, nl + 1);
        return reply;
      }
      const auto left =
          std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
      if (left.count() <= 0) {
        throw Error(ErrorCode::kMutTimeout,
                    "no reply within " + std::to_string(timeout.count()) + " ms");
      }
      pollfd pfd{w.out, POLLIN, 0};
      const int r = ::poll(&pfd, 1, static_cast<int>(left.count()));
      if (r < 0 && errno == EINTR) continue;
      if (r == 0) continue;
      char chunk[4096];
      const ssize_t n = ::read(w.out, chunk, sizeof chunk);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) fail_exited(w);
      w.buffer.append(chunk, static_cast<std::size_t>(n));
    }
  }
};

SubprocessModel::SubprocessModel(std::string command, std::chrono::milliseconds timeout,
                                 std::size_t max_in_flight, std::filesystem::path working_dir)
    : impl_(std::make_unique<Impl>()) {
  if (timeout.count() <= 0 || max_in_flight == 0) {
    throw Error(ErrorCode::kInvalidArgument, "timeout and max_in_flight must be positive");
  }
  ::signal(SIGPIPE, SIG_IGN);
  impl_->command = std::move(command);
  impl_->working_dir = std::move(working_dir);
  impl_->timeout = timeout;
  impl_->workers.resize(max_in_flight);
}

SubprocessModel::~SubprocessModel() {
  for (Worker& w : impl_->workers) stop(w, std::chrono::milliseconds(1000));
}

std::size_t SubprocessModel::max_in_flight() const { return impl_->workers.size(); }

int SubprocessModel::restarts() const {
  std::lock_guard lock(impl_->mu);
  return impl_->restarts;
}

TaskOutput SubprocessModel::evaluate(const Query& query) {
  Worker& w = impl_->acquire();
  std::uint64_t id = 0;
  {
    std::lock_guard lock(impl_->mu);
    id = impl_->next_id++;
  }
  Response r;
  try {
    r = decode_response(impl_->roundtrip(w, encode_request(id, query)));
  } catch (...) {
    impl_->release(w, true);
    throw;
  }
  impl_->release(w, r.id != id);
  if (r.id != id) {
    throw Error(ErrorCode::kMutProtocol,
                "reply id " + std::to_string(r.id) + " for request " + std::to_string(id));
  }
  if (!r.output) throw Error(ErrorCode::kMutProtocol, "model reported: " + r.error);
  if (task_of(*r.output) != query.task) {
    throw Error(ErrorCode::kMutProtocol, "reply is for a different task");
  }
  return *r.output;
}

}  // namespace fairgram

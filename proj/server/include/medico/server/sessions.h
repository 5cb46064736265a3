// Copyright 2026 The Medico Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MEDICO_SERVER_SESSIONS_H_
#define MEDICO_SERVER_SESSIONS_H_

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "medico/dialogue/dialogue.h"

namespace medico::server {

// One consumer of a session's event stream. Publishing never blocks: when
// a slow reader falls `kCapacity` events behind, the oldest are dropped and
// the gap shows up in the sequence numbers.
class Subscriber {
 public:
  static constexpr std::size_t kCapacity = 256;

  void Push(const nlohmann::json& event);
  // Waits up to `timeout`; nullopt on timeout or once closed and drained.
  std::optional<nlohmann::json> Pop(std::chrono::milliseconds timeout);
  void Close();
  bool closed() const;
  std::size_t dropped() const;

 private:
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<nlohmann::json> queue_;
  bool closed_ = false;
  std::size_t dropped_ = 0;
};

struct Session {
  const std::string id;
  // Serialises turns of this session; other sessions proceed in parallel.
  std::mutex turn_mu;
  dialogue::DialogueState state;  // guarded by turn_mu

  explicit Session(std::string session_id) : id(std::move(session_id)) {
    state.session_id = id;
  }

 private:
  friend class SessionRegistry;
  std::chrono::steady_clock::time_point last_used;
  std::vector<std::weak_ptr<Subscriber>> subscribers;
  std::uint64_t next_seq = 1;
};

class SessionRegistry {
 public:
  using SteadyClock = std::function<std::chrono::steady_clock::time_point()>;

  explicit SessionRegistry(std::chrono::seconds ttl, SteadyClock clock = nullptr);
  ~SessionRegistry();

  // Unknown or absent ids create a session (absent: a fresh random token).
  std::shared_ptr<Session> Acquire(const std::optional<std::string>& id);
  std::shared_ptr<Session> Find(const std::string& id);

  std::shared_ptr<Subscriber> Subscribe(const std::string& id);
  // Stamps `event` with sessionId and seq and fans it out.
  void Publish(Session& session, nlohmann::json event);

  // Drops sessions idle longer than the TTL that have no open subscriber,
  // returning how many went.
  std::size_t Expire();
  // Closes every subscriber, e.g. on shutdown.
  void CloseAll();
  std::size_t size() const;

 private:
  std::string NewId();

  std::chrono::seconds ttl_;
  SteadyClock clock_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::mt19937_64 rng_;
};

}  // namespace medico::server

#endif  // MEDICO_SERVER_SESSIONS_H_

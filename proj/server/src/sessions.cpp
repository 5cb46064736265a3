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

#include "medico/server/sessions.h"

#include <algorithm>

#include <fmt/format.h>

namespace medico::server {

void Subscriber::Push(const nlohmann::json& event) {
  {
    std::lock_guard lock(mu_);
    if (closed_) return;
    if (queue_.size() == kCapacity) {
      queue_.pop_front();
      ++dropped_;
    }
    queue_.push_back(event);
  }
  cv_.notify_one();
}

std::optional<nlohmann::json> Subscriber::Pop(std::chrono::milliseconds timeout) {
  std::unique_lock lock(mu_);
  cv_.wait_for(lock, timeout, [&] { return closed_ || !queue_.empty(); });
  if (queue_.empty()) return std::nullopt;
  nlohmann::json event = std::move(queue_.front());
  queue_.pop_front();
  return event;
}

void Subscriber::Close() {
  {
    std::lock_guard lock(mu_);
    closed_ = true;
  }
  cv_.notify_all();
}

bool Subscriber::closed() const {
  std::lock_guard lock(mu_);
  return closed_;
}

std::size_t Subscriber::dropped() const {
  std::lock_guard lock(mu_);
  return dropped_;
}

SessionRegistry::SessionRegistry(std::chrono::seconds ttl, SteadyClock clock)
    : ttl_(ttl), clock_(std::move(clock)), rng_(std::random_device{}()) {
  if (!clock_) clock_ = [] { return std::chrono::steady_clock::now(); };
}

SessionRegistry::~SessionRegistry() { CloseAll(); }

std::string SessionRegistry::NewId() {
  return fmt::format("{:016x}{:016x}", rng_(), rng_());
}

std::shared_ptr<Session> SessionRegistry::Acquire(const std::optional<std::string>& id) {
  std::lock_guard lock(mu_);
  std::string key = id && !id->empty() ? *id : NewId();
  auto& slot = sessions_[key];
  if (!slot) slot = std::make_shared<Session>(key);
  slot->last_used = clock_();
  return slot;
}

std::shared_ptr<Session> SessionRegistry::Find(const std::string& id) {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) return nullptr;
  it->second->last_used = clock_();
  return it->second;
}

std::shared_ptr<Subscriber> SessionRegistry::Subscribe(const std::string& id) {
  auto session = Acquire(id);
  auto sub = std::make_shared<Subscriber>();
  std::lock_guard lock(mu_);
  session->subscribers.push_back(sub);
  return sub;
}

void SessionRegistry::Publish(Session& session, nlohmann::json event) {
  std::vector<std::shared_ptr<Subscriber>> live;
  {
    std::lock_guard lock(mu_);
    event["sessionId"] = session.id;
    event["seq"] = session.next_seq++;
    auto& subs = session.subscribers;
    subs.erase(std::remove_if(subs.begin(), subs.end(),
                              [](const auto& w) {
                                auto s = w.lock();
                                return !s || s->closed();
                              }),
               subs.end());
    for (const auto& w : subs) {
      if (auto s = w.lock()) live.push_back(std::move(s));
    }
  }
  for (const auto& s : live) s->Push(event);
}

std::size_t SessionRegistry::Expire() {
  std::vector<std::shared_ptr<Session>> gone;
  {
    std::lock_guard lock(mu_);
    auto now = clock_();
    for (auto it = sessions_.begin(); it != sessions_.end();) {
      const auto& subs = it->second->subscribers;
      bool watched = std::any_of(subs.begin(), subs.end(), [](const auto& w) {
        auto s = w.lock();
        return s && !s->closed();
      });
      if (!watched && now - it->second->last_used > ttl_) {
        gone.push_back(it->second);
        it = sessions_.erase(it);
      } else {
        ++it;
      }
    }
  }
  return gone.size();
}

void SessionRegistry::CloseAll() {
  std::lock_guard lock(mu_);
  for (auto& [id, session] : sessions_) {
    for (const auto& w : session->subscribers) {
      if (auto s = w.lock()) s->Close();
    }
  }
}

std::size_t SessionRegistry::size() const {
  std::lock_guard lock(mu_);
  return sessions_.size();
}

}  // namespace medico::server

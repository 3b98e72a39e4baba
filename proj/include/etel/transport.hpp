// Copyright 2026 The etel Authors
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

#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include "etel/wire.hpp"

namespace etel {

struct ChannelConfig {
  double fixed_delay = 0.0;       // s
  double jitter = 0.0;            // s, uniform in [0, jitter]
  double loss_probability = 0.0;  // [0, 1]
  bool reorder = false;           // allow later messages to overtake earlier ones
  void validate() const;
};

// Deterministic in-process link. Delays are quantised to control steps: a
// message sent at step k with delay d is deliverable from step k + d on.
template <class T>
class InprocChannel {
 public:
  InprocChannel(ChannelConfig cfg, double t_s, std::uint64_t seed) : cfg_(cfg), t_s_(t_s), rng_(seed) {
    cfg_.validate();
  }

  void send(std::uint64_t step, T msg) {
    ++sent_;
    if (cfg_.loss_probability > 0.0 && unit_(rng_) < cfg_.loss_probability) {
      ++dropped_;
      return;
    }
    double delay = cfg_.fixed_delay;
    if (cfg_.jitter > 0.0) delay += cfg_.jitter * unit_(rng_);
    std::uint64_t due = step + static_cast<std::uint64_t>(std::llround(delay / t_s_));
    if (!cfg_.reorder) due = std::max(due, last_due_);
    last_due_ = due;
    queue_.emplace_back(due, order_++, std::move(msg));
  }

  // Messages deliverable at `step`, oldest first.
  std::vector<T> deliver(std::uint64_t step) {
    std::stable_sort(queue_.begin(), queue_.end(), [](const Entry& a, const Entry& b) {
      return std::get<0>(a) != std::get<0>(b) ? std::get<0>(a) < std::get<0>(b) : std::get<1>(a) < std::get<1>(b);
    });
    std::vector<T> out;
    auto it = queue_.begin();
    for (; it != queue_.end() && std::get<0>(*it) <= step; ++it) out.push_back(std::move(std::get<2>(*it)));
    queue_.erase(queue_.begin(), it);
    delivered_ += out.size();
    return out;
  }

  std::uint64_t sent() const { return sent_; }
  std::uint64_t dropped() const { return dropped_; }
  std::uint64_t delivered() const { return delivered_; }

 private:
  using Entry = std::tuple<std::uint64_t, std::uint64_t, T>;
  ChannelConfig cfg_;
  double t_s_;
  std::mt19937_64 rng_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  std::vector<Entry> queue_;
  std::uint64_t last_due_ = 0;
  std::uint64_t order_ = 0;
  std::uint64_t sent_ = 0, dropped_ = 0, delivered_ = 0;
};

// Single-slot latest-value mailbox. Writers deposit (seq, value); the slot
// only ever moves to a higher seq, and a reader never sees a seq it has
// already consumed.
template <class T>
class Mailbox {
 public:
  void offer(std::uint64_t seq, T value) {
    {
      std::lock_guard<std::mutex> lk(mu_);
      if (has_ && seq <= seq_) return;
      seq_ = seq;
      value_ = std::move(value);
      has_ = true;
    }
    cv_.notify_all();
  }

  // Newest unconsumed value, if any. Never blocks.
  std::optional<T> take() {
    std::lock_guard<std::mutex> lk(mu_);
    return take_locked();
  }

  // Waits up to `timeout` for a value with seq >= min_seq; returns the
  // newest unconsumed value (possibly older than min_seq) or nothing.
  template <class Rep, class Period>
  std::optional<T> take_waiting(std::uint64_t min_seq, std::chrono::duration<Rep, Period> timeout) {
    std::unique_lock<std::mutex> lk(mu_);
    cv_.wait_for(lk, timeout, [&] { return has_ && seq_ >= min_seq; });
    return take_locked();
  }

  std::optional<std::uint64_t> last_consumed() const {
    std::lock_guard<std::mutex> lk(mu_);
    return consumed_any_ ? std::optional<std::uint64_t>(consumed_) : std::nullopt;
  }

 private:
  std::optional<T> take_locked() {
    if (!has_ || (consumed_any_ && seq_ <= consumed_)) return std::nullopt;
    consumed_ = seq_;
    consumed_any_ = true;
    return value_;
  }

  mutable std::mutex mu_;
  std::condition_variable cv_;
  bool has_ = false;
  std::uint64_t seq_ = 0;
  T value_{};
  bool consumed_any_ = false;
  std::uint64_t consumed_ = 0;
};

struct UdpEndpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;
};

// Appends raw datagrams to a file: u32 big-endian length, then the bytes.
class CaptureWriter {
 public:
  explicit CaptureWriter(const std::string& path);
  void write(const std::uint8_t* data, std::size_t size);

 private:
  std::mutex mu_;
  std::ofstream out_;
};

std::vector<std::vector<std::uint8_t>> read_capture(const std::string& path);

// Best-effort datagram link carrying WireMessages. A receiver thread parses
// datagrams from the peer and deposits them into a latest-wins mailbox.
class UdpTransport {
 public:
  UdpTransport(const UdpEndpoint& bind, const UdpEndpoint& peer, const GroupParams& params,
               std::uint64_t session_id, Role self, const std::string& capture_path = {});
  ~UdpTransport();
  UdpTransport(const UdpTransport&) = delete;
  UdpTransport& operator=(const UdpTransport&) = delete;

  // Re-targets outgoing datagrams (e.g. once the peer's ephemeral port is
  // known). Not safe concurrently with send().
  void set_peer(const UdpEndpoint& peer);
  // Returns false if the socket refused the datagram.
  bool send(const WireMessage& msg);
  Mailbox<WireMessage>& inbox() { return inbox_; }
  std::uint16_t bound_port() const { return bound_port_; }

  std::uint64_t send_failures() const { return send_failures_; }
  std::uint64_t rejected() const { return rejected_; }
  std::uint64_t received() const { return received_; }

 private:
  void receive_loop();

  int fd_ = -1;
  std::uint16_t bound_port_ = 0;
  std::vector<std::uint8_t> peer_addr_;  // sockaddr_in storage
  GroupParams params_;
  std::uint64_t session_id_;
  Role self_;
  std::optional<CaptureWriter> capture_;
  Mailbox<WireMessage> inbox_;
  std::atomic<bool> stop_{false};
  std::atomic<std::uint64_t> send_failures_{0}, rejected_{0}, received_{0};
  std::thread rx_;
};

}  // namespace etel

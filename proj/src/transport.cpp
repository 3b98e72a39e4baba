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

#include "etel/transport.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <sys/time.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "etel/errors.hpp"

namespace etel {

void ChannelConfig::validate() const {
  if (!(fixed_delay >= 0.0) || !(jitter >= 0.0)) throw ConfigError("channel: delay and jitter must be >= 0");
  if (!(loss_probability >= 0.0 && loss_probability <= 1.0))
    throw ConfigError("channel: loss probability must be in [0, 1]");
}

CaptureWriter::CaptureWriter(const std::string& path) : out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw ConfigError("capture: cannot open '" + path + "'");
}

void CaptureWriter::write(const std::uint8_t* data, std::size_t size) {
  std::lock_guard<std::mutex> lk(mu_);
  const std::uint8_t len[4] = {static_cast<std::uint8_t>(size >> 24), static_cast<std::uint8_t>(size >> 16),
                               static_cast<std::uint8_t>(size >> 8), static_cast<std::uint8_t>(size)};
  out_.write(reinterpret_cast<const char*>(len), 4);
  out_.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(size));
  out_.flush();
}

std::vector<std::vector<std::uint8_t>> read_capture(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("capture: cannot open '" + path + "'");
  std::vector<std::vector<std::uint8_t>> out;
  std::uint8_t len[4];
  while (in.read(reinterpret_cast<char*>(len), 4)) {
    const std::size_t n = (std::size_t{len[0]} << 24) | (std::size_t{len[1]} << 16) |
                          (std::size_t{len[2]} << 8) | std::size_t{len[3]};
    std::vector<std::uint8_t> buf(n);
    if (!in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n)))
      throw ParseError("capture: truncated record", out.size());
    out.push_back(std::move(buf));
  }
  return out;
}

namespace {

sockaddr_in make_addr(const UdpEndpoint& ep) {
  sockaddr_in a{};
  a.sin_family = AF_INET;
  a.sin_port = htons(ep.port);
  if (inet_pton(AF_INET, ep.host.c_str(), &a.sin_addr) != 1)
    throw ConfigError("udp: invalid IPv4 address '" + ep.host + "'");
  return a;
}

}  // namespace

UdpTransport::UdpTransport(const UdpEndpoint& bind_ep, const UdpEndpoint& peer, const GroupParams& params,
                           std::uint64_t session_id, Role self, const std::string& capture_path)
    : params_(params), session_id_(session_id), self_(self) {
  fd_ = ::socket(AF_INET, SOCK_DGRAM, 0);
  if (fd_ < 0) throw TransportError(std::string("udp: socket: ") + std::strerror(errno));
  sockaddr_in local = make_addr(bind_ep);
  if (::bind(fd_, reinterpret_cast<sockaddr*>(&local), sizeof(local)) != 0) {
    int err = errno;
    ::close(fd_);
    throw TransportError(std::string("udp: bind: ") + std::strerror(err));
  }
  socklen_t len = sizeof(local);
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&local), &len);
  bound_port_ = ntohs(local.sin_port);

  timeval tv{0, 20000};
  ::setsockopt(fd_, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));

  set_peer(peer);
  if (!capture_path.empty()) capture_.emplace(capture_path);
  rx_ = std::thread([this] { receive_loop(); });
}

UdpTransport::~UdpTransport() {
  stop_ = true;
  if (rx_.joinable()) rx_.join();
  if (fd_ >= 0) ::close(fd_);
}

void UdpTransport::set_peer(const UdpEndpoint& peer) {
  sockaddr_in remote = make_addr(peer);
  peer_addr_.resize(sizeof(remote));
  std::memcpy(peer_addr_.data(), &remote, sizeof(remote));
}

bool UdpTransport::send(const WireMessage& msg) {
  std::vector<std::uint8_t> bytes = serialize(msg, params_);
  if (capture_) capture_->write(bytes.data(), bytes.size());
  ssize_t n = ::sendto(fd_, bytes.data(), bytes.size(), 0, reinterpret_cast<const sockaddr*>(peer_addr_.data()),
                       static_cast<socklen_t>(peer_addr_.size()));
  if (n != static_cast<ssize_t>(bytes.size())) {
    ++send_failures_;
    return false;
  }
  return true;
}

void UdpTransport::receive_loop() {
  std::vector<std::uint8_t> buf(65536);
  while (!stop_) {
    ssize_t n = ::recvfrom(fd_, buf.data(), buf.size(), 0, nullptr, nullptr);
    if (n < 0) continue;  // timeout or transient error; the loop sees silence
    if (capture_) capture_->write(buf.data(), static_cast<std::size_t>(n));
    try {
      WireMessage msg = deserialize(buf.data(), static_cast<std::size_t>(n), params_);
      if (msg.session_id != session_id_ || msg.role == self_) {
        ++rejected_;
        continue;
      }
      ++received_;
      const std::uint64_t seq = msg.seq;
      inbox_.offer(seq, std::move(msg));
    } catch (const ParseError&) {
      ++rejected_;
    }
  }
}

}  // namespace etel

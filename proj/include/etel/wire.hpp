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

#include <cstddef>
#include <cstdint>
#include <vector>

#include "etel/elgamal.hpp"
#include "etel/encrypted.hpp"

namespace etel {

enum class Role : std::uint8_t { kLeader = 0, kFollower = 1 };
inline Role peer_of(Role r) { return r == Role::kLeader ? Role::kFollower : Role::kLeader; }
const char* role_name(Role r);

struct AxisPayload {
  Ciphertext enc_theta;
  ProductRow force_row;

  friend bool operator==(const AxisPayload& a, const AxisPayload& b) {
    return a.enc_theta == b.enc_theta && a.force_row == b.force_row;
  }
};

// Layout (big-endian):
//   "ETEL" | version u8 | session_id u64 | seq u64 | role u8 | axis_count u8
//   per axis: enc_theta, force_row[11]; each ciphertext = c1 || c2, each
//   ceil(bits(p)/8) bytes.
struct WireMessage {
  static constexpr std::uint8_t kVersion = 1;
  static constexpr std::size_t kHeaderSize = 23;
  static constexpr std::size_t kMaxDatagram = 1472;  // one Ethernet MTU of UDP payload

  std::uint64_t session_id = 0;
  std::uint64_t seq = 0;
  Role role = Role::kLeader;
  std::vector<AxisPayload> axes;

  friend bool operator==(const WireMessage& a, const WireMessage& b) {
    return a.session_id == b.session_id && a.seq == b.seq && a.role == b.role && a.axes == b.axes;
  }
};

std::size_t wire_length(std::size_t axis_count, std::size_t element_bytes);

// Throws TransportError if the datagram would exceed kMaxDatagram.
std::vector<std::uint8_t> serialize(const WireMessage& msg, const GroupParams& params);
// Validates magic, version, role, length and ciphertext ranges; throws
// ParseError with the failing offset.
WireMessage deserialize(const std::uint8_t* data, std::size_t size, const GroupParams& params);
inline WireMessage deserialize(const std::vector<std::uint8_t>& bytes, const GroupParams& params) {
  return deserialize(bytes.data(), bytes.size(), params);
}

// Fixed-width big-endian encoding of a non-negative integer.
void put_integer(std::vector<std::uint8_t>& out, const mpz_class& v, std::size_t width);

}  // namespace etel

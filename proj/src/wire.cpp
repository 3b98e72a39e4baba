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

#include "etel/wire.hpp"

#include <cstring>

#include "etel/errors.hpp"

namespace etel {

namespace {

constexpr char kMagic[4] = {'E', 'T', 'E', 'L'};

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 7; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_u64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | p[i];
  return v;
}

mpz_class get_integer(const std::uint8_t* p, std::size_t width) {
  mpz_class v;
  mpz_import(v.get_mpz_t(), width, 1, 1, 1, 0, p);
  return v;
}

}  // namespace

const char* role_name(Role r) { return r == Role::kLeader ? "leader" : "follower"; }

std::size_t wire_length(std::size_t axis_count, std::size_t element_bytes) {
  return WireMessage::kHeaderSize + axis_count * (1 + kXiSize) * 2 * element_bytes;
}

void put_integer(std::vector<std::uint8_t>& out, const mpz_class& v, std::size_t width) {
  if (sgn(v) < 0) throw TransportError("wire: negative integer");
  std::size_t len = (mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8;
  if (sgn(v) == 0) len = 0;
  if (len > width) throw TransportError("wire: integer wider than the field");
  const std::size_t start = out.size();
  out.resize(start + width, 0);
  if (len) {
    std::size_t written = 0;
    mpz_export(out.data() + start + (width - len), &written, 1, 1, 1, 0, v.get_mpz_t());
  }
}

std::vector<std::uint8_t> serialize(const WireMessage& msg, const GroupParams& params) {
  if (msg.axes.size() > 255) throw TransportError("wire: too many axes");
  const std::size_t w = params.element_bytes();
  const std::size_t total = wire_length(msg.axes.size(), w);
  if (total > WireMessage::kMaxDatagram)
    throw TransportError("wire: message of " + std::to_string(total) +
                         " bytes needs fragmentation, which is unsupported");
  std::vector<std::uint8_t> out;
  out.reserve(total);
  out.insert(out.end(), kMagic, kMagic + 4);
  out.push_back(WireMessage::kVersion);
  put_u64(out, msg.session_id);
  put_u64(out, msg.seq);
  out.push_back(static_cast<std::uint8_t>(msg.role));
  out.push_back(static_cast<std::uint8_t>(msg.axes.size()));
  auto put_ct = [&](const Ciphertext& c) {
    if (c.c1 >= params.p || c.c2 >= params.p) throw TransportError("wire: ciphertext not reduced mod p");
    put_integer(out, c.c1, w);
    put_integer(out, c.c2, w);
  };
  for (const AxisPayload& a : msg.axes) {
    put_ct(a.enc_theta);
    for (const Ciphertext& c : a.force_row) put_ct(c);
  }
  return out;
}

WireMessage deserialize(const std::uint8_t* data, std::size_t size, const GroupParams& params) {
  if (size < WireMessage::kHeaderSize) throw ParseError("wire: truncated header", size);
  if (std::memcmp(data, kMagic, 4) != 0) throw ParseError("wire: bad magic", 0);
  if (data[4] != WireMessage::kVersion) throw ParseError("wire: unsupported version", 4);
  WireMessage msg;
  msg.session_id = get_u64(data + 5);
  msg.seq = get_u64(data + 13);
  if (data[21] > 1) throw ParseError("wire: unknown sender role", 21);
  msg.role = static_cast<Role>(data[21]);
  const std::size_t axes = data[22];
  const std::size_t w = params.element_bytes();
  const std::size_t expected = wire_length(axes, w);
  if (size != expected)
    throw ParseError("wire: length " + std::to_string(size) + " != expected " + std::to_string(expected),
                     std::min(size, expected));

  std::size_t off = WireMessage::kHeaderSize;
  auto get_ct = [&]() {
    Ciphertext c;
    c.c1 = get_integer(data + off, w);
    if (c.c1 < 1 || c.c1 >= params.p) throw ParseError("wire: ciphertext component out of range", off);
    off += w;
    c.c2 = get_integer(data + off, w);
    if (c.c2 < 1 || c.c2 >= params.p) throw ParseError("wire: ciphertext component out of range", off);
    off += w;
    return c;
  };
  msg.axes.resize(axes);
  for (AxisPayload& a : msg.axes) {
    a.enc_theta = get_ct();
    for (Ciphertext& c : a.force_row) c = get_ct();
  }
  return msg;
}

}  // namespace etel

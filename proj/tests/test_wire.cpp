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

#include <doctest.h>

#include <cstring>

#include "etel/errors.hpp"
#include "etel/wire.hpp"

using namespace etel;

namespace {

const KeyPair& keys128() {
  static const KeyPair kp = [] {
    RandomSource rng(55);
    return gen(128, rng);
  }();
  return kp;
}

Ciphertext random_ct(const GroupParams& gp, RandomSource& rng) { return {rng.uniform(1, gp.p - 1), rng.uniform(1, gp.p - 1)}; }

WireMessage random_message(const GroupParams& gp, RandomSource& rng, std::size_t axes) {
  WireMessage m;
  m.session_id = rng.next_u64();
  m.seq = rng.next_u64();
  m.role = rng.next_u64() % 2 ? Role::kFollower : Role::kLeader;
  m.axes.resize(axes);
  for (auto& a : m.axes) {
    a.enc_theta = random_ct(gp, rng);
    for (auto& c : a.force_row) c = random_ct(gp, rng);
  }
  return m;
}

std::uint64_t read_be64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = v << 8 | p[i];
  return v;
}

}  // namespace

TEST_CASE("wire length arithmetic") {
  CHECK(wire_length(2, 16) == 791);
  CHECK(wire_length(1, 16) == 23 + 12 * 2 * 16);
  CHECK(keys128().pk.params.element_bytes() == 16);
}

TEST_CASE("header layout is big-endian as documented") {
  const GroupParams& gp = keys128().pk.params;
  RandomSource rng(1);
  WireMessage m = random_message(gp, rng, 2);
  m.session_id = 0x0102030405060708ULL;
  m.seq = 42;
  m.role = Role::kFollower;
  auto bytes = serialize(m, gp);
  REQUIRE(bytes.size() == 791);
  CHECK(std::memcmp(bytes.data(), "ETEL", 4) == 0);
  CHECK(bytes[4] == 1);
  CHECK(read_be64(&bytes[5]) == 0x0102030405060708ULL);
  CHECK(read_be64(&bytes[13]) == 42);
  CHECK(bytes[21] == 1);
  CHECK(bytes[22] == 2);
  // first ciphertext component of axis 0
  mpz_class c1;
  mpz_import(c1.get_mpz_t(), 16, 1, 1, 1, 0, &bytes[23]);
  CHECK(c1 == m.axes[0].enc_theta.c1);
}

TEST_CASE("round trip on random messages") {
  const GroupParams& gp = keys128().pk.params;
  RandomSource rng(2);
  std::size_t failures = 0;
  for (int i = 0; i < 2000; ++i) {
    WireMessage m = random_message(gp, rng, 1 + i % 2);
    if (!(deserialize(serialize(m, gp), gp) == m)) ++failures;
  }
  CHECK(failures == 0);
  // small values are zero-padded to the full width
  WireMessage m = random_message(gp, rng, 1);
  m.axes[0].enc_theta = {1, 2};
  CHECK(deserialize(serialize(m, gp), gp) == m);
}

TEST_CASE("malformed datagrams are rejected with an offset") {
  const GroupParams& gp = keys128().pk.params;
  RandomSource rng(3);
  auto bytes = serialize(random_message(gp, rng, 2), gp);

  auto expect_parse = [&](std::vector<std::uint8_t> b, std::size_t offset) {
    try {
      deserialize(b, gp);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.offset() == offset);
    }
  };
  expect_parse({bytes.begin(), bytes.end() - 1}, bytes.size() - 1);
  expect_parse({bytes.begin(), bytes.begin() + 10}, 10);
  auto b = bytes;
  b[0] = 'X';
  expect_parse(b, 0);
  b = bytes;
  b[4] = 9;
  expect_parse(b, 4);
  b = bytes;
  b[21] = 7;
  expect_parse(b, 21);
  b = bytes;
  std::memset(&b[23], 0, 16);  // c1 = 0
  expect_parse(b, 23);
  b = bytes;
  std::memset(&b[39], 0xff, 16);  // c2 >= p
  expect_parse(b, 39);
}

TEST_CASE("serialize refuses what it cannot represent") {
  const GroupParams& gp = keys128().pk.params;
  RandomSource rng(4);
  WireMessage m = random_message(gp, rng, 1);
  m.axes[0].enc_theta.c1 = gp.p;
  CHECK_THROWS_AS(serialize(m, gp), TransportError);
  // 4 axes at 16-byte elements exceed one datagram
  CHECK_THROWS_AS(serialize(random_message(gp, rng, 4), gp), TransportError);
  std::vector<std::uint8_t> out;
  CHECK_THROWS_AS(put_integer(out, mpz_class(1) << 130, 16), TransportError);
}

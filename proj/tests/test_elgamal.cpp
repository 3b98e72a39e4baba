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

#include <cstdio>
#include <filesystem>
#include <set>

#include "etel/bigint.hpp"
#include "etel/elgamal.hpp"
#include "etel/errors.hpp"
#include "support/toy_group.hpp"

using namespace etel;

namespace {

GroupParams p23() {
  GroupParams gp;
  gp.p = 23;
  gp.q = 11;
  gp.g = 4;
  return gp;
}

bool in_subgroup(const GroupParams& gp, const mpz_class& x) {
  mpz_class r;
  mpz_powm(r.get_mpz_t(), x.get_mpz_t(), gp.q.get_mpz_t(), gp.p.get_mpz_t());
  return r == 1;
}

}  // namespace

TEST_CASE("pow_mod and inv_mod agree with GMP") {
  RandomSource rng(7);
  for (int i = 0; i < 200; ++i) {
    mpz_class m = rng.exact_bits(97) | 1;
    mpz_class b = rng.uniform(0, m - 1), e = rng.uniform(0, m);
    mpz_class want;
    mpz_powm(want.get_mpz_t(), b.get_mpz_t(), e.get_mpz_t(), m.get_mpz_t());
    CHECK(pow_mod(b, e, m) == want);
  }
  CHECK(pow_mod(5, 0, 7) == 1);
  CHECK(inv_mod(2, 23) == 12);
  CHECK_THROWS_AS(inv_mod(6, 9), DomainError);
}

TEST_CASE("Miller-Rabin matches trial division below 20000") {
  RandomSource rng(3);
  for (unsigned long n = 0; n < 20000; ++n) CHECK(is_probable_prime(n, rng) == testing::naive_prime(n));
  // Carmichael numbers
  for (unsigned long n : {561ul, 1105ul, 1729ul, 41041ul, 825265ul}) CHECK_FALSE(is_probable_prime(n, rng));
}

TEST_CASE("gen at lambda=16 yields a 16-bit safe prime") {
  RandomSource rng(11);
  KeyPair kp = gen(16, rng);
  const GroupParams& gp = kp.pk.params;
  CHECK(gp.bits() == 16);
  CHECK(gp.p == 2 * gp.q + 1);
  CHECK(testing::naive_prime(gp.p.get_ui()));
  CHECK(testing::naive_prime(gp.q.get_ui()));
  CHECK(in_subgroup(gp, gp.g));
  CHECK(gp.g != 1);
  CHECK(kp.sk.s >= 1);
  CHECK(kp.sk.s <= gp.q - 1);
  CHECK(kp.pk.h == pow_mod(gp.g, kp.sk.s, gp.p));
  CHECK_NOTHROW(gp.validate());
}

TEST_CASE("gen is deterministic under a seed and rejects tiny lambda") {
  RandomSource a(99), b(99);
  KeyPair ka = gen(64, a), kb = gen(64, b);
  CHECK(ka.pk.params.p == kb.pk.params.p);
  CHECK(ka.pk.h == kb.pk.h);
  CHECK(ka.sk.s == kb.sk.s);
  CHECK(encrypt(ka.pk, 4, a) == encrypt(kb.pk, 4, b));
  RandomSource c(1);
  CHECK_THROWS_AS(gen(15, c), DomainError);
}

TEST_CASE("lambda=128 round trip") {
  RandomSource rng(2026);
  KeyPair kp = gen(128, rng);
  CHECK(kp.pk.params.bits() == 128);
  for (int i = 0; i < 50; ++i) {
    mpz_class m = pow_mod(kp.pk.params.g, rng.uniform(0, kp.pk.params.q - 1), kp.pk.params.p);
    CHECK(decrypt(kp.sk, kp.pk, encrypt(kp.pk, m, rng)) == m);
  }
}

TEST_CASE("toy group p=23 by hand") {
  KeyPair kp = keys_from_secret(p23(), 3);
  CHECK(kp.pk.h == 18);

  Ciphertext c = encrypt_with_nonce(kp.pk, 9, 2);
  CHECK(c.c1 == 16);
  CHECK(c.c2 == 18);
  CHECK(decrypt(kp.sk, kp.pk, c) == 9);

  // r = 0 is degenerate but accepted
  CHECK(decrypt(kp.sk, kp.pk, Ciphertext{1, 13}) == 13);

  // identity plaintext
  for (int r = 0; r < 11; ++r) {
    Ciphertext one = encrypt_with_nonce(kp.pk, 1, r);
    CHECK(one.c2 == pow_mod(kp.pk.h, r, 23));
    CHECK(decrypt(kp.sk, kp.pk, one) == 1);
  }

  const GroupParams gp = p23();
  CHECK(decrypt(kp.sk, kp.pk, hmul(gp, encrypt_with_nonce(kp.pk, 9, 4), encrypt_with_nonce(kp.pk, 1, 7))) == 9);
  CHECK(decrypt(kp.sk, kp.pk, hmul(gp, encrypt_with_nonce(kp.pk, 9, 4), encrypt_with_nonce(kp.pk, 3, 7))) == 4);
}

TEST_CASE("encrypt rejects non-members, decrypt rejects malformed") {
  KeyPair kp = keys_from_secret(p23(), 3);
  RandomSource rng(1);
  CHECK_THROWS_AS(encrypt(kp.pk, 5, rng), DomainError);  // 5 is a non-residue mod 23
  CHECK_THROWS_AS(encrypt(kp.pk, 0, rng), DomainError);
  CHECK_THROWS_AS(decrypt(kp.sk, kp.pk, Ciphertext{0, 9}), MalformedCiphertext);
  CHECK_THROWS_AS(decrypt(kp.sk, kp.pk, Ciphertext{16, 23}), MalformedCiphertext);
  CHECK_THROWS_AS(keys_from_secret(p23(), 0), DomainError);
  CHECK_THROWS_AS(keys_from_secret(p23(), 11), DomainError);
}

TEST_CASE("probabilistic encryption") {
  RandomSource rng(5);
  KeyPair kp = gen(64, rng);
  Ciphertext a = encrypt(kp.pk, 16, rng), b = encrypt(kp.pk, 16, rng);
  CHECK_FALSE(a == b);
  CHECK(decrypt(kp.sk, kp.pk, a) == decrypt(kp.sk, kp.pk, b));
}

TEST_CASE("exhaustive round trip and homomorphism on a toy group") {
  const GroupParams gp = testing::toy_group(1009);
  REQUIRE(gp.q > 500);
  RandomSource rng(17);
  KeyPair kp = gen_with_params(gp, rng);
  const auto members = testing::subgroup_members(gp);
  CHECK(std::set<unsigned long>(members.begin(), members.end()).size() == members.size());

  std::size_t failures = 0;
  for (unsigned long m : members) {
    Ciphertext c = encrypt(kp.pk, m, rng);
    if (!in_subgroup(gp, c.c1) || !in_subgroup(gp, c.c2)) ++failures;
    if (decrypt(kp.sk, kp.pk, c) != m) ++failures;
  }
  CHECK(failures == 0);

  // products against direct modular multiplication
  const unsigned long p = gp.p.get_ui();
  for (int i = 0; i < 10000; ++i) {
    unsigned long m1 = members[rng.next_u64() % members.size()];
    unsigned long m2 = members[rng.next_u64() % members.size()];
    Ciphertext c = hmul(gp, encrypt(kp.pk, m1, rng), encrypt(kp.pk, m2, rng));
    if (decrypt(kp.sk, kp.pk, c) != m1 * m2 % p) ++failures;
  }
  CHECK(failures == 0);
}

TEST_CASE("homomorphism at lambda=128, 1000 random pairs") {
  RandomSource rng(128);
  KeyPair kp = gen(128, rng);
  const GroupParams& gp = kp.pk.params;
  std::size_t failures = 0;
  for (int i = 0; i < 1000; ++i) {
    mpz_class m1 = pow_mod(gp.g, rng.uniform(0, gp.q - 1), gp.p);
    mpz_class m2 = pow_mod(gp.g, rng.uniform(0, gp.q - 1), gp.p);
    mpz_class want = m1 * m2 % gp.p;
    if (decrypt(kp.sk, kp.pk, hmul(gp, encrypt(kp.pk, m1, rng), encrypt(kp.pk, m2, rng))) != want) ++failures;
  }
  CHECK(failures == 0);
}

TEST_CASE("key file round trip") {
  RandomSource rng(8);
  KeyPair kp = gen(64, rng);
  const auto dir = std::filesystem::temp_directory_path();
  const std::string full = (dir / "etel_test_full.key").string();
  const std::string pub = (dir / "etel_test_pub.key").string();
  write_key_file(full, kp.pk, &kp.sk);
  write_key_file(pub, kp.pk, nullptr);
  KeyFile a = read_key_file(full), b = read_key_file(pub);
  CHECK(a.pk.params.p == kp.pk.params.p);
  CHECK(a.pk.params.q == kp.pk.params.q);
  CHECK(a.pk.params.g == kp.pk.params.g);
  CHECK(a.pk.h == kp.pk.h);
  REQUIRE(a.sk.has_value());
  CHECK(a.sk->s == kp.sk.s);
  CHECK_FALSE(b.sk.has_value());
  CHECK_THROWS_AS(read_key_file((dir / "etel_no_such.key").string()), ConfigError);
  std::remove(full.c_str());
  std::remove(pub.c_str());
}

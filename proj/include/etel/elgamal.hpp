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

#include <gmpxx.h>

#include <optional>
#include <string>

#include "etel/bigint.hpp"

namespace etel {

// Which subgroup of Z_p* carries plaintexts.
enum class GroupMode {
  kQuadraticResidue,  // p = 2q+1, order-q subgroup of squares
  kFull,              // all of Z_p*, q = p-1
};

struct GroupParams {
  mpz_class p;
  mpz_class q;
  mpz_class g;
  GroupMode mode = GroupMode::kQuadraticResidue;

  unsigned bits() const { return static_cast<unsigned>(mpz_sizeinbase(p.get_mpz_t(), 2)); }
  // Byte width of one group element on the wire.
  std::size_t element_bytes() const { return (bits() + 7) / 8; }
  // Membership in the plaintext subgroup (Euler's criterion in QR mode).
  bool contains(const mpz_class& m) const;
  // Checks the structural invariants; throws ConfigError on violation.
  void validate() const;
};

struct PublicKey {
  GroupParams params;
  mpz_class h;
};

struct SecretKey {
  mpz_class s;
};

struct Ciphertext {
  mpz_class c1;
  mpz_class c2;

  friend bool operator==(const Ciphertext& a, const Ciphertext& b) {
    return a.c1 == b.c1 && a.c2 == b.c2;
  }
};

struct KeyPair {
  PublicKey pk;
  SecretKey sk;
};

// Safe prime p = 2q+1 of exactly `lambda` bits, QR subgroup generator.
GroupParams generate_group(unsigned lambda, RandomSource& rng, GroupMode mode = GroupMode::kQuadraticResidue);

KeyPair gen(unsigned lambda, RandomSource& rng, GroupMode mode = GroupMode::kQuadraticResidue);
// Key pair over fixed group parameters; s drawn from rng.
KeyPair gen_with_params(const GroupParams& params, RandomSource& rng);
KeyPair keys_from_secret(const GroupParams& params, const mpz_class& s);

Ciphertext encrypt(const PublicKey& pk, const mpz_class& m, RandomSource& rng);
// Deterministic variant with an explicit nonce r in [0, q-1].
Ciphertext encrypt_with_nonce(const PublicKey& pk, const mpz_class& m, const mpz_class& r);
mpz_class decrypt(const SecretKey& sk, const PublicKey& pk, const Ciphertext& c);
Ciphertext hmul(const GroupParams& params, const Ciphertext& a, const Ciphertext& b);

// Throws MalformedCiphertext unless both components lie in [1, p-1].
void check_ciphertext(const GroupParams& params, const Ciphertext& c);

// Text key file: one `name = value` per line, integers in hex (0x...) or
// decimal. The secret exponent is optional.
struct KeyFile {
  PublicKey pk;
  std::optional<SecretKey> sk;
};
void write_key_file(const std::string& path, const PublicKey& pk, const SecretKey* sk);
KeyFile read_key_file(const std::string& path);

}  // namespace etel

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

#include "etel/elgamal.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "etel/errors.hpp"

namespace etel {

namespace {

constexpr int kMaxPrimeAttempts = 2'000'000;

// Cheap rejection of q (and 2q+1) having a small factor.
bool passes_sieve(const mpz_class& q) {
  for (unsigned long r : small_primes()) {
    if (q <= r) break;
    unsigned long qr = mpz_fdiv_ui(q.get_mpz_t(), r);
    if (qr == 0) return false;
    if ((2 * qr + 1) % r == 0) return false;
  }
  return true;
}

mpz_class parse_int(const std::string& text, const std::string& field) {
  mpz_class v;
  std::string digits = text;
  int base = 10;
  if (digits.size() > 2 && digits[0] == '0' && (digits[1] == 'x' || digits[1] == 'X')) {
    digits = digits.substr(2);
    base = 16;
  }
  if (digits.empty() || v.set_str(digits, base) != 0)
    throw ConfigError("key file: field '" + field + "' is not an integer");
  return v;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

bool GroupParams::contains(const mpz_class& m) const {
  if (m < 1 || m >= p) return false;
  if (mode == GroupMode::kFull) return true;
  return pow_mod(m, q, p) == 1;
}

void GroupParams::validate() const {
  if (p < 5) throw ConfigError("group: modulus too small");
  if (mode == GroupMode::kQuadraticResidue) {
    if (p != 2 * q + 1) throw ConfigError("group: QR mode requires p = 2q + 1");
  } else if (q != p - 1) {
    throw ConfigError("group: full mode requires q = p - 1");
  }
  if (g <= 1 || g >= p) throw ConfigError("group: generator out of range");
  if (pow_mod(g, q, p) != 1) throw ConfigError("group: g^q != 1 mod p");
  if (mpz_probab_prime_p(p.get_mpz_t(), 30) == 0) throw ConfigError("group: p is not prime");
}

GroupParams generate_group(unsigned lambda, RandomSource& rng, GroupMode mode) {
  if (lambda < 16) throw DomainError("gen: lambda must be at least 16 bits");
  for (int attempt = 0; attempt < kMaxPrimeAttempts; ++attempt) {
    mpz_class q = rng.exact_bits(lambda - 1);
    mpz_setbit(q.get_mpz_t(), 0);
    if (!passes_sieve(q)) continue;
    // One round each before paying for the full test.
    if (!is_probable_prime(q, rng, 1)) continue;
    mpz_class p = 2 * q + 1;
    if (!is_probable_prime(p, rng, 1)) continue;
    if (!is_probable_prime(q, rng, 64) || !is_probable_prime(p, rng, 64)) continue;

    GroupParams gp;
    gp.p = p;
    gp.mode = mode;
    if (mode == GroupMode::kQuadraticResidue) {
      gp.q = q;
      mpz_class g;
      do {
        mpz_class a = rng.uniform(2, p - 2);
        g = a * a % p;
      } while (g == 1);
      gp.g = g;
    } else {
      gp.q = p - 1;
      mpz_class g;
      do {
        g = rng.uniform(2, p - 2);
      } while (pow_mod(g, 2, p) == 1 || pow_mod(g, q, p) == 1);
      gp.g = g;
    }
    return gp;
  }
  throw GenerationError("gen: no safe prime found within the attempt bound");
}

KeyPair gen_with_params(const GroupParams& params, RandomSource& rng) {
  return keys_from_secret(params, rng.uniform(1, params.q - 1));
}

KeyPair gen(unsigned lambda, RandomSource& rng, GroupMode mode) {
  return gen_with_params(generate_group(lambda, rng, mode), rng);
}

KeyPair keys_from_secret(const GroupParams& params, const mpz_class& s) {
  if (s < 1 || s > params.q - 1) throw DomainError("keys: secret exponent out of [1, q-1]");
  KeyPair kp;
  kp.pk.params = params;
  kp.pk.h = pow_mod(params.g, s, params.p);
  kp.sk.s = s;
  return kp;
}

Ciphertext encrypt_with_nonce(const PublicKey& pk, const mpz_class& m, const mpz_class& r) {
  const GroupParams& gp = pk.params;
  if (!gp.contains(m)) throw DomainError("encrypt: plaintext is not a subgroup member");
  if (r < 0 || r >= gp.q) throw DomainError("encrypt: nonce out of range");
  Ciphertext c;
  c.c1 = pow_mod(gp.g, r, gp.p);
  c.c2 = m * pow_mod(pk.h, r, gp.p) % gp.p;
  return c;
}

Ciphertext encrypt(const PublicKey& pk, const mpz_class& m, RandomSource& rng) {
  return encrypt_with_nonce(pk, m, rng.uniform(1, pk.params.q - 1));
}

void check_ciphertext(const GroupParams& params, const Ciphertext& c) {
  if (c.c1 < 1 || c.c1 >= params.p || c.c2 < 1 || c.c2 >= params.p)
    throw MalformedCiphertext("ciphertext component outside [1, p-1]");
}

mpz_class decrypt(const SecretKey& sk, const PublicKey& pk, const Ciphertext& c) {
  const GroupParams& gp = pk.params;
  check_ciphertext(gp, c);
  mpz_class shared = pow_mod(c.c1, sk.s, gp.p);
  return c.c2 * inv_mod(shared, gp.p) % gp.p;
}

Ciphertext hmul(const GroupParams& params, const Ciphertext& a, const Ciphertext& b) {
  check_ciphertext(params, a);
  check_ciphertext(params, b);
  return Ciphertext{a.c1 * b.c1 % params.p, a.c2 * b.c2 % params.p};
}

void write_key_file(const std::string& path, const PublicKey& pk, const SecretKey* sk) {
  std::ofstream out(path);
  if (!out) throw ConfigError("key file: cannot open '" + path + "' for writing");
  const GroupParams& gp = pk.params;
  out << "# etel session key\n";
  out << "format = etel-key-1\n";
  out << "mode = " << (gp.mode == GroupMode::kQuadraticResidue ? "qr" : "full") << "\n";
  out << "p = 0x" << gp.p.get_str(16) << "\n";
  out << "q = 0x" << gp.q.get_str(16) << "\n";
  out << "g = 0x" << gp.g.get_str(16) << "\n";
  out << "h = 0x" << pk.h.get_str(16) << "\n";
  if (sk) out << "s = 0x" << sk->s.get_str(16) << "\n";
  if (!out) throw ConfigError("key file: write to '" + path + "' failed");
}

KeyFile read_key_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("key file: cannot open '" + path + "'");
  std::map<std::string, std::string> fields;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("key file: malformed line '" + line + "'");
    fields[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  auto need = [&](const char* name) -> const std::string& {
    auto it = fields.find(name);
    if (it == fields.end()) throw ConfigError(std::string("key file: missing field '") + name + "'");
    return it->second;
  };

  KeyFile kf;
  GroupParams& gp = kf.pk.params;
  auto mode = fields.count("mode") ? fields["mode"] : std::string("qr");
  if (mode == "qr") {
    gp.mode = GroupMode::kQuadraticResidue;
  } else if (mode == "full") {
    gp.mode = GroupMode::kFull;
  } else {
    throw ConfigError("key file: unknown mode '" + mode + "'");
  }
  gp.p = parse_int(need("p"), "p");
  gp.q = parse_int(need("q"), "q");
  gp.g = parse_int(need("g"), "g");
  gp.validate();
  kf.pk.h = parse_int(need("h"), "h");
  if (!gp.contains(kf.pk.h)) throw ConfigError("key file: h is not a subgroup member");
  if (fields.count("s")) {
    SecretKey sk{parse_int(fields["s"], "s")};
    if (sk.s < 1 || sk.s > gp.q - 1) throw ConfigError("key file: s out of range");
    if (pow_mod(gp.g, sk.s, gp.p) != kf.pk.h) throw ConfigError("key file: h != g^s");
    kf.sk = sk;
  }
  return kf;
}

}  // namespace etel

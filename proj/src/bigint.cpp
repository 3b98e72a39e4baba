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

#include "etel/bigint.hpp"

#include "etel/errors.hpp"

namespace etel {

RandomSource::RandomSource(std::uint64_t seed) : big_(gmp_randinit_mt), real_(seed) {
  big_.seed(mpz_class(std::to_string(seed)));
}

mpz_class RandomSource::uniform(const mpz_class& lo, const mpz_class& hi) {
  if (hi < lo) throw DomainError("RandomSource::uniform: empty range");
  mpz_class span = hi - lo + 1;
  return lo + big_.get_z_range(span);
}

mpz_class RandomSource::exact_bits(unsigned bits) {
  if (bits == 0) throw DomainError("RandomSource::exact_bits: zero width");
  mpz_class v = big_.get_z_bits(bits);
  mpz_setbit(v.get_mpz_t(), bits - 1);
  return v;
}

double RandomSource::uniform01() { return std::uniform_real_distribution<double>(0.0, 1.0)(real_); }

double RandomSource::normal(double sigma) {
  return std::normal_distribution<double>(0.0, sigma)(real_);
}

std::uint64_t RandomSource::next_u64() { return real_(); }

mpz_class pow_mod(const mpz_class& base, const mpz_class& exp, const mpz_class& m) {
  if (sgn(m) <= 0) throw DomainError("pow_mod: modulus must be positive");
  if (sgn(exp) < 0) throw DomainError("pow_mod: negative exponent");
  if (m == 1) return 0;
  mpz_class b = base % m;
  if (sgn(b) < 0) b += m;
  mpz_class r = 1;
  for (long i = static_cast<long>(mpz_sizeinbase(exp.get_mpz_t(), 2)) - 1; i >= 0; --i) {
    mpz_mul(r.get_mpz_t(), r.get_mpz_t(), r.get_mpz_t());
    mpz_tdiv_r(r.get_mpz_t(), r.get_mpz_t(), m.get_mpz_t());
    if (mpz_tstbit(exp.get_mpz_t(), static_cast<mp_bitcnt_t>(i))) {
      mpz_mul(r.get_mpz_t(), r.get_mpz_t(), b.get_mpz_t());
      mpz_tdiv_r(r.get_mpz_t(), r.get_mpz_t(), m.get_mpz_t());
    }
  }
  return r;
}

mpz_class inv_mod(const mpz_class& a, const mpz_class& m) {
  mpz_class r;
  if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0)
    throw DomainError("inv_mod: element not invertible");
  return r;
}

const std::vector<unsigned long>& small_primes() {
  static const std::vector<unsigned long> primes = [] {
    constexpr unsigned long kLimit = 20000;
    std::vector<bool> composite(kLimit + 1, false);
    std::vector<unsigned long> out;
    for (unsigned long i = 3; i <= kLimit; i += 2) {
      if (composite[i]) continue;
      out.push_back(i);
      for (unsigned long j = i * i; j <= kLimit; j += 2 * i) composite[j] = true;
    }
    return out;
  }();
  return primes;
}

bool is_probable_prime(const mpz_class& n, RandomSource& rng, int rounds) {
  if (n < 2) return false;
  if (n == 2 || n == 3) return true;
  if (mpz_even_p(n.get_mpz_t())) return false;
  for (unsigned long p : small_primes()) {
    if (n == p) return true;
    if (mpz_divisible_ui_p(n.get_mpz_t(), p)) return false;
  }

  const mpz_class n1 = n - 1;
  mpz_class d = n1;
  unsigned long r = 0;
  while (mpz_even_p(d.get_mpz_t())) {
    d >>= 1;
    ++r;
  }
  for (int round = 0; round < rounds; ++round) {
    mpz_class a = rng.uniform(2, n - 2);
    mpz_class x = pow_mod(a, d, n);
    if (x == 1 || x == n1) continue;
    bool witness = true;
    for (unsigned long i = 1; i < r; ++i) {
      x = x * x % n;
      if (x == n1) {
        witness = false;
        break;
      }
    }
    if (witness) return false;
  }
  return true;
}

}  // namespace etel

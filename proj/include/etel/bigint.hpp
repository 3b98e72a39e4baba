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

#include <cstdint>
#include <random>
#include <vector>

namespace etel {

// Seedable source of randomness. Big integers come from GMP's Mersenne
// Twister, reals from std::mt19937_64; both are derived from one seed so a
// run is replayable from a single number.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed);

  // Uniform integer in [lo, hi]. Requires lo <= hi.
  mpz_class uniform(const mpz_class& lo, const mpz_class& hi);
  // Uniform integer with exactly `bits` bits (top bit set).
  mpz_class exact_bits(unsigned bits);

  double uniform01();
  double normal(double sigma);
  std::uint64_t next_u64();

  std::mt19937_64& engine() { return real_; }

 private:
  gmp_randclass big_;
  std::mt19937_64 real_;
};

// base^exp mod m by left-to-right square-and-multiply. exp >= 0, m > 0.
mpz_class pow_mod(const mpz_class& base, const mpz_class& exp, const mpz_class& m);

// Modular inverse; throws DomainError if a is not invertible mod m.
mpz_class inv_mod(const mpz_class& a, const mpz_class& m);

// Miller-Rabin with `rounds` random bases, preceded by trial division by
// small primes.
bool is_probable_prime(const mpz_class& n, RandomSource& rng, int rounds = 64);

// First few hundred odd primes used by the sieve.
const std::vector<unsigned long>& small_primes();

}  // namespace etel

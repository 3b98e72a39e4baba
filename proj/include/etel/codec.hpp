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

#include <cstddef>

#include "etel/elgamal.hpp"

namespace etel {

// Result of one encode: the chosen member together with the integer it was
// aiming at, so callers can account for the nearest-member slack.
struct Encoded {
  mpz_class member;
  mpz_class target;     // round(gamma*x), plus p for x < 0
  unsigned long slack;  // |member - target|
};

// Fixed-point map between reals and plaintext-subgroup members:
//   x >= 0 -> nearest member to round(gamma*x)
//   x <  0 -> nearest member to round(gamma*x) + p
class Codec {
 public:
  Codec(double gamma, GroupParams params);

  double gamma() const { return gamma_; }
  const GroupParams& params() const { return params_; }

  mpz_class encode(double x) const { return encode_detail(x).member; }
  Encoded encode_detail(double x) const;

  // Value of m at scale total_gamma; members above p/2 are negative.
  double decode(const mpz_class& m, double total_gamma) const;
  double decode(const mpz_class& m) const { return decode(m, gamma_); }

  // Signed integer that a member stands for, in (-p/2, p/2].
  mpz_class signed_value(const mpz_class& m) const;

 private:
  double gamma_;
  GroupParams params_;
  mpz_class half_p_;
};

// Decoding of a product of two members at scale gamma_c*gamma_p, computed
// with the exact product of the two gains.
double decode_product(const GroupParams& params, const mpz_class& m, double gamma_c, double gamma_p);

// m / total rounded to the nearest double.
double rational_to_double(const mpq_class& v);

struct SlackStats {
  std::size_t samples = 0;
  unsigned long max_slack = 0;
  double mean_slack = 0.0;
};

// Empirical distance from random integer targets in [1, span] to the nearest
// subgroup member.
SlackStats measure_slack(const GroupParams& params, RandomSource& rng, std::size_t samples,
                         const mpz_class& span);

}  // namespace etel

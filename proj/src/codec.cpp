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

#include "etel/codec.hpp"

#include <cmath>
#include <limits>

#include "etel/errors.hpp"

namespace etel {

namespace {

// Scan budget for the nearest-member search. In QR mode about half of all
// residues are members, so the typical distance is one or two.
constexpr unsigned long kMaxScan = 1UL << 20;

unsigned long nearest_member(const GroupParams& gp, const mpz_class& target, mpz_class& out) {
  for (unsigned long d = 0; d <= kMaxScan; ++d) {
    mpz_class up = target + d;
    if (up >= 1 && up < gp.p && gp.contains(up)) {
      out = up;
      return d;
    }
    if (d == 0) continue;
    mpz_class down = target - d;
    if (down >= 1 && down < gp.p && gp.contains(down)) {
      out = down;
      return d;
    }
  }
  throw RangeError("encode: no subgroup member near target");
}

}  // namespace

Codec::Codec(double gamma, GroupParams params) : gamma_(gamma), params_(std::move(params)) {
  if (!(gamma_ > 0.0) || !std::isfinite(gamma_)) throw ConfigError("codec: gamma must be positive");
  half_p_ = params_.p / 2;
}

Encoded Codec::encode_detail(double x) const {
  if (!std::isfinite(x)) throw RangeError("encode: non-finite value");
  // gamma*x in exact rational arithmetic; double products lose the low
  // digits once |gamma*x| passes 2^53.
  mpq_class v = mpq_class(x) * mpq_class(gamma_);
  v += mpq_class(1, 2);
  mpz_class n;
  mpz_fdiv_q(n.get_mpz_t(), v.get_num_mpz_t(), v.get_den_mpz_t());
  if (abs(n) >= half_p_) throw RangeError("encode: |gamma*x| = " + mpz_class(abs(n)).get_str() + " exceeds p/2");

  Encoded e;
  e.target = sgn(n) < 0 ? n + params_.p : n;
  e.slack = nearest_member(params_, e.target, e.member);
  return e;
}

mpz_class Codec::signed_value(const mpz_class& m) const { return m > half_p_ ? m - params_.p : m; }

double Codec::decode(const mpz_class& m, double total_gamma) const {
  return rational_to_double(mpq_class(signed_value(m)) / mpq_class(total_gamma));
}

double decode_product(const GroupParams& params, const mpz_class& m, double gamma_c, double gamma_p) {
  mpz_class half = params.p / 2;
  mpz_class s = m > half ? m - params.p : m;
  return rational_to_double(mpq_class(s) / (mpq_class(gamma_c) * mpq_class(gamma_p)));
}

double rational_to_double(const mpq_class& v) {
  double d = v.get_d();  // truncates toward zero
  double best = d;
  mpq_class best_err = abs(mpq_class(d) - v);
  for (double c : {std::nextafter(d, std::numeric_limits<double>::infinity()),
                   std::nextafter(d, -std::numeric_limits<double>::infinity())}) {
    if (!std::isfinite(c)) continue;
    mpq_class err = abs(mpq_class(c) - v);
    if (err < best_err) {
      best_err = err;
      best = c;
    }
  }
  return best;
}

SlackStats measure_slack(const GroupParams& params, RandomSource& rng, std::size_t samples,
                         const mpz_class& span) {
  SlackStats st;
  mpz_class hi = span < params.p - 1 ? span : params.p - 1;
  double total = 0.0;
  mpz_class member;
  for (std::size_t i = 0; i < samples; ++i) {
    unsigned long d = nearest_member(params, rng.uniform(1, hi), member);
    st.max_slack = std::max(st.max_slack, d);
    total += static_cast<double>(d);
  }
  st.samples = samples;
  st.mean_slack = samples ? total / static_cast<double>(samples) : 0.0;
  return st;
}

}  // namespace etel

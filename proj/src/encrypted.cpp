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

#include "etel/encrypted.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "etel/errors.hpp"

namespace etel {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

ProductBudget::ProductBudget(const GroupParams& params, const std::array<mpz_class, kXiSize>& column_max)
    : half_p_(params.p / 2), column_max_(column_max) {}

bool ProductBudget::admits(int column, const mpz_class& signed_signal) const {
  if (half_p_ == 0) return true;
  return column_max_[column] * abs(signed_signal) < half_p_;
}

double ProductBudget::limit(int column, double gamma_p) const {
  if (column_max_[column] == 0) return std::numeric_limits<double>::infinity();
  mpq_class lim(half_p_, column_max_[column]);
  return lim.get_d() / gamma_p;
}

EncryptedController encrypt_controller(const ControllerMatrices& c, const PublicKey& pk,
                                       const Codec& codec_c, RandomSource& rng) {
  EncryptedController ec;
  ec.gamma_c = codec_c.gamma();
  std::array<mpz_class, kXiSize> column_max{};
  for (int i = 0; i < kPsiSize; ++i) {
    for (int j = 0; j < kXiSize; ++j) {
      Encoded e;
      try {
        e = codec_c.encode_detail(c.phi(i, j));
      } catch (const RangeError& err) {
        throw ConfigError("controller entry phi[" + std::to_string(i) + "][" + std::to_string(j) +
                          "] = " + std::to_string(c.phi(i, j)) + " exceeds the codec range: " + err.what());
      }
      ec.enc_phi[i][j] = encrypt(pk, e.member, rng);
      ec.slack[i][j] = e.slack;
      mpz_class mag = abs(codec_c.signed_value(e.member));
      if (mag > column_max[j]) column_max[j] = mag;
    }
  }
  ec.budget = ProductBudget(pk.params, column_max);
  return ec;
}

EncryptedSignalVector encrypt_signals(const Xi& xi, const PublicKey& pk, const Codec& codec_p,
                                      RandomSource& rng, const ProductBudget* budget,
                                      const std::array<std::optional<Ciphertext>, kXiSize>* pass_through) {
  EncryptedSignalVector es;
  es.gamma_p = codec_p.gamma();
  for (int j = 0; j < kXiSize; ++j) {
    if (pass_through && (*pass_through)[j]) {
      es.enc_xi[j] = *(*pass_through)[j];
      es.slack[j] = 0;
      continue;
    }
    Encoded e = codec_p.encode_detail(xi[j]);
    if (budget && !budget->admits(j, codec_p.signed_value(e.member)))
      throw RangeError("signal xi[" + std::to_string(j) + "] = " + std::to_string(xi[j]) +
                       " exceeds the product budget");
    es.enc_xi[j] = encrypt(pk, e.member, rng);
    es.slack[j] = e.slack;
  }
  return es;
}

ProductRows hadamard_eval(const GroupParams& params, const EncryptedController& ec,
                          const EncryptedSignalVector& es) {
  ProductRows rows;
  for (int i = 0; i < kPsiSize; ++i)
    for (int j = 0; j < kXiSize; ++j) rows[i][j] = hmul(params, ec.enc_phi[i][j], es.enc_xi[j]);
  return rows;
}

double dec_plus(const ProductRow& row, const SecretKey& sk, const PublicKey& pk, double gamma_c,
                double gamma_p) {
  for (const Ciphertext& c : row) check_ciphertext(pk.params, c);
  double sum = 0.0;
  for (const Ciphertext& c : row) sum += decode_product(pk.params, decrypt(sk, pk, c), gamma_c, gamma_p);
  return sum;
}

double row_error_bound(const ControllerMatrices& c, int row, const Xi& xi, const EncryptedController& ec,
                       const EncryptedSignalVector& es) {
  constexpr double kEps = std::numeric_limits<double>::epsilon() / 2.0;
  const double gc = ec.gamma_c;
  const double gp = es.gamma_p;
  double quant = 0.0;
  double magnitude = 0.0;
  for (int j = 0; j < kXiSize; ++j) {
    const double ephi = 0.5 + static_cast<double>(ec.slack[row][j]);
    const double exi = 0.5 + static_cast<double>(es.slack[j]);
    const double phi = std::abs(c.phi(row, j));
    const double x = std::abs(xi[j]);
    quant += phi * exi / gp + x * ephi / gc + ephi * exi / (gc * gp);
    magnitude += phi * x + (phi * exi / gp + x * ephi / gc);
  }
  // Each side rounds 11 products and 10 additions in double precision.
  const double rounding = 2.0 * 2.0 * kXiSize * kEps * magnitude;
  return quant + rounding;
}

EncryptedAxisController::EncryptedAxisController(const ControllerMatrices& c, const KeyPair& keys,
                                                 double gamma_c, double gamma_p, RandomSource& rng)
    : plain_(c),
      keys_(keys),
      codec_c_(gamma_c, keys.pk.params),
      codec_p_(gamma_p, keys.pk.params),
      rng_(rng),
      ec_(encrypt_controller(c, keys.pk, codec_c_, rng)) {
  // Until the first evaluation the outbound row carries encoded zeros.
  const mpz_class one = 1;
  for (auto& ct : outbound_row_) ct = encrypt(keys_.pk, one, rng_);
}

Ciphertext EncryptedAxisController::encrypt_value(double x) {
  return encrypt(keys_.pk, codec_p_.encode(x), rng_);
}

EncryptedAxisController::Result EncryptedAxisController::step(const Inputs& in) {
  Result res;
  const GroupParams& gp = keys_.pk.params;

  auto t0 = Clock::now();
  if (in.remote_row) {
    try {
      tau_e_other_ = dec_plus(*in.remote_row, keys_.sk, keys_.pk, codec_c_.gamma(), codec_p_.gamma());
    } catch (const MalformedCiphertext&) {
      ++alarms_;
      res.alarm = true;
    }
  }
  if (in.enc_theta_other) {
    try {
      check_ciphertext(gp, *in.enc_theta_other);
      held_theta_other_ = *in.enc_theta_other;
    } catch (const MalformedCiphertext&) {
      ++alarms_;
      res.alarm = true;
    }
  }
  if (!held_theta_other_) held_theta_other_ = encrypt_value(0.0);
  res.timing.decrypt += seconds_since(t0);

  AxisSignals s;
  s.theta_self = in.theta_self;
  s.omega = in.omega;
  s.tau_e_other = tau_e_other_;
  s.f = in.f;
  Xi xi = make_xi(x_, s, tau_e_self_prev_);

  std::array<std::optional<Ciphertext>, kXiSize> pass{};
  pass[kXiThetaOther] = held_theta_other_;
  if (in.enc_theta_self) pass[kXiThetaSelf] = *in.enc_theta_self;

  t0 = Clock::now();
  EncryptedSignalVector es;
  try {
    es = encrypt_signals(xi, keys_.pk, codec_p_, rng_, &ec_.budget, &pass);
  } catch (const RangeError&) {
    ++alarms_;
    res.alarm = true;
    res.out = last_out_;
    res.timing.encrypt += seconds_since(t0);
    return res;
  }
  for (unsigned long sl : es.slack) max_slack_ = std::max(max_slack_, sl);
  res.timing.encrypt += seconds_since(t0);

  t0 = Clock::now();
  ProductRows rows = hadamard_eval(gp, ec_, es);
  res.timing.hmul = seconds_since(t0);

  t0 = Clock::now();
  Psi psi{};
  for (int i = 0; i < kPsiSize; ++i)
    psi[i] = dec_plus(rows[i], keys_.sk, keys_.pk, codec_c_.gamma(), codec_p_.gamma());
  res.timing.decrypt += seconds_since(t0);

  for (int j = 0; j < kStateSize; ++j) x_[j] = psi[j];
  tau_e_self_prev_ = psi[kPsiTauE];
  outbound_row_ = rows[kPsiTauE];
  last_out_ = {psi[kPsiCurrent], psi[kPsiTauD], psi[kPsiTauE]};
  res.out = last_out_;
  return res;
}

EncryptedEvaluation EncryptedAxisController::evaluate(const Xi& xi) {
  EncryptedEvaluation ev;
  auto t0 = Clock::now();
  ev.signals = encrypt_signals(xi, keys_.pk, codec_p_, rng_, &ec_.budget);
  for (unsigned long sl : ev.signals.slack) max_slack_ = std::max(max_slack_, sl);
  ev.timing.encrypt = seconds_since(t0);
  t0 = Clock::now();
  ev.rows = hadamard_eval(keys_.pk.params, ec_, ev.signals);
  ev.timing.hmul = seconds_since(t0);
  t0 = Clock::now();
  for (int i = 0; i < kPsiSize; ++i)
    ev.psi[i] = dec_plus(ev.rows[i], keys_.sk, keys_.pk, codec_c_.gamma(), codec_p_.gamma());
  ev.timing.decrypt = seconds_since(t0);
  return ev;
}

ControllerOutput EncryptedAxisController::shadow_step(const AxisSignals& common_v, double tau_e_self_common,
                                                      Psi* psi_out, double* bound_out, double* exact_out) {
  const Xi xi = make_xi(x_, common_v, tau_e_self_common);
  EncryptedEvaluation ev = evaluate(xi);
  if (bound_out) *bound_out = row_error_bound(plain_, kPsiCurrent, xi, ec_, ev.signals);
  if (psi_out) *psi_out = ev.psi;
  if (exact_out) *exact_out = eval_plain(plain_, xi)[kPsiCurrent];
  for (int j = 0; j < kStateSize; ++j) x_[j] = ev.psi[j];
  tau_e_self_prev_ = ev.psi[kPsiTauE];
  outbound_row_ = ev.rows[kPsiTauE];
  last_out_ = {ev.psi[kPsiCurrent], ev.psi[kPsiTauD], ev.psi[kPsiTauE]};
  return last_out_;
}

}  // namespace etel

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

#include <array>
#include <cstddef>
#include <optional>

#include "etel/codec.hpp"
#include "etel/controller.hpp"
#include "etel/elgamal.hpp"

namespace etel {

using ProductRow = std::array<Ciphertext, kXiSize>;
using ProductRows = std::array<ProductRow, kPsiSize>;

// Largest |Phi_ij| integer per column; a signal entry xi_j is admissible if
// every product with its column stays below p/2.
class ProductBudget {
 public:
  ProductBudget() = default;
  ProductBudget(const GroupParams& params, const std::array<mpz_class, kXiSize>& column_max);

  bool admits(int column, const mpz_class& signed_signal) const;
  // Largest |xi_j| (in real units at gamma_p) the column admits.
  double limit(int column, double gamma_p) const;

 private:
  mpz_class half_p_;
  std::array<mpz_class, kXiSize> column_max_{};
};

struct EncryptedController {
  std::array<std::array<Ciphertext, kXiSize>, kPsiSize> enc_phi;
  double gamma_c = 0.0;
  // Nearest-member distances of the encoded entries (for the error bound).
  std::array<std::array<unsigned long, kXiSize>, kPsiSize> slack{};
  ProductBudget budget;
};

struct EncryptedSignalVector {
  std::array<Ciphertext, kXiSize> enc_xi;
  double gamma_p = 0.0;
  std::array<unsigned long, kXiSize> slack{};  // 0 for pass-through entries
};

// Encrypts every entry of Phi once. Throws ConfigError naming the entry if
// an entry is outside the codec range.
EncryptedController encrypt_controller(const ControllerMatrices& c, const PublicKey& pk,
                                       const Codec& codec_c, RandomSource& rng);

// Fresh encryptions of xi. Entries present in `pass_through` are inserted as
// given (already-encrypted remote values). Throws RangeError when a value is
// outside the codec range or the product budget.
EncryptedSignalVector encrypt_signals(const Xi& xi, const PublicKey& pk, const Codec& codec_p,
                                      RandomSource& rng, const ProductBudget* budget = nullptr,
                                      const std::array<std::optional<Ciphertext>, kXiSize>* pass_through = nullptr);

ProductRows hadamard_eval(const GroupParams& params, const EncryptedController& ec,
                          const EncryptedSignalVector& es);

// Decrypt every product of the row and add the decoded values.
double dec_plus(const ProductRow& row, const SecretKey& sk, const PublicKey& pk, double gamma_c,
                double gamma_p);

// Worst-case |psi_enc - psi_plain| for one row with the given entry slacks.
double row_error_bound(const ControllerMatrices& c, int row, const Xi& xi, const EncryptedController& ec,
                       const EncryptedSignalVector& es);

// Wall-clock split of one encrypted evaluation, seconds.
struct EncryptedTiming {
  double encrypt = 0.0;
  double hmul = 0.0;
  double decrypt = 0.0;
  double total() const { return encrypt + hmul + decrypt; }
};

struct EncryptedEvaluation {
  Psi psi{};
  ProductRows rows;
  EncryptedSignalVector signals;
  EncryptedTiming timing;
};

// Encrypted controller of one axis on one node. Holds the encrypted Phi and
// the recycled state; remote inputs arrive as ciphertexts.
class EncryptedAxisController {
 public:
  EncryptedAxisController(const ControllerMatrices& c, const KeyPair& keys, double gamma_c, double gamma_p,
                          RandomSource& rng);

  const PublicKey& public_key() const { return keys_.pk; }
  const Codec& codec_p() const { return codec_p_; }
  const EncryptedController& encrypted_phi() const { return ec_; }

  Ciphertext encrypt_value(double x);

  // Full cycle. `enc_theta_self` must be the ciphertext this node sends;
  // `enc_theta_other` and `remote_row` come from the peer (nullptr = hold).
  struct Inputs {
    const Ciphertext* enc_theta_self = nullptr;
    double theta_self = 0.0;
    const Ciphertext* enc_theta_other = nullptr;
    const ProductRow* remote_row = nullptr;
    double omega = 0.0;
    double f = 0.0;
  };
  struct Result {
    ControllerOutput out;
    bool alarm = false;  // budget violation or malformed remote data; output held
    EncryptedTiming timing;
  };
  Result step(const Inputs& in);

  // Evaluates Phi * xi with every entry freshly encrypted (shadow use).
  EncryptedEvaluation evaluate(const Xi& xi);

  // Shadow mode: state recycled here, inputs v supplied by the caller.
  // `exact_out` receives the plaintext Phi*xi current for the same xi, and
  // `bound_out` the codec bound on their difference.
  ControllerOutput shadow_step(const AxisSignals& common_v, double tau_e_self_common, Psi* psi_out = nullptr,
                               double* bound_out = nullptr, double* exact_out = nullptr);

  // Row to transmit: products of the latest tau_e evaluation.
  const ProductRow& outbound_row() const { return outbound_row_; }
  const std::array<double, kStateSize>& state() const { return x_; }
  double tau_e_other() const { return tau_e_other_; }
  std::size_t alarms() const { return alarms_; }
  unsigned long max_signal_slack() const { return max_slack_; }

 private:
  ControllerMatrices plain_;  // kept only for the error-bound audit
  KeyPair keys_;
  Codec codec_c_;
  Codec codec_p_;
  RandomSource& rng_;
  EncryptedController ec_;
  std::array<double, kStateSize> x_{};
  double tau_e_self_prev_ = 0.0;
  double tau_e_other_ = 0.0;
  std::optional<Ciphertext> held_theta_other_;
  ProductRow outbound_row_;
  ControllerOutput last_out_{};
  std::size_t alarms_ = 0;
  unsigned long max_slack_ = 0;
};

}  // namespace etel

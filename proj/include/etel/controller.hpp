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

#include <Eigen/Core>

#include <array>
#include <string>
#include <utility>

#include "etel/observer.hpp"
#include "etel/plant.hpp"

namespace etel {

inline constexpr int kStateSize = 5;
inline constexpr int kInputSize = 6;
inline constexpr int kXiSize = kStateSize + kInputSize;  // 11
inline constexpr int kPsiSize = kStateSize + 2;          // 7

// Positions in xi = [x; v].
enum XiIndex : int {
  kXiE = 0,
  kXiEdot = 1,
  kXiQ = 2,
  kXiZ = 3,
  kXiI = 4,
  kXiThetaOther = 5,
  kXiThetaSelf = 6,
  kXiOmega = 7,
  kXiTauOther = 8,
  kXiTauSelf = 9,
  kXiF = 10,
};

// Positions in psi = [x_next; tau_d; tau_e].
enum PsiIndex : int {
  kPsiCurrent = 4,  // the i state row is also the current command
  kPsiTauD = 5,
  kPsiTauE = 6,
};

using Xi = std::array<double, kXiSize>;
using Psi = std::array<double, kPsiSize>;
using PhiMatrix = Eigen::Matrix<double, kPsiSize, kXiSize, Eigen::RowMajor>;

// Psi = Phi * xi for one node and axis; the same matrix serves leader and
// follower since the node-local xi already lists (other, self).
struct ControllerMatrices {
  PhiMatrix phi = PhiMatrix::Zero();
};

ControllerMatrices assemble_phi(const ControllerGains& g, const MotorParams& m);
Psi eval_plain(const ControllerMatrices& c, const Xi& xi);

// Plain-text matrix dump, one row per line, for audit.
std::string format_phi(const ControllerMatrices& c);

// Rank of [C; CA] for the (omega, tau_d) model with output row `c`.
int observability_rank(const MotorParams& m, const std::array<double, 2>& c);
// Rank for the measured-velocity output; throws DomainError if J_bar == 0.
int observability_check(const MotorParams& m);

// Signals a node feeds its controller each period.
struct AxisSignals {
  double theta_other = 0.0;
  double theta_self = 0.0;
  double omega = 0.0;
  double tau_e_other = 0.0;  // remote estimate from the previous period
  double f = 0.0;            // model value f(theta, omega)
};

struct ControllerOutput {
  double current = 0.0;
  double tau_d = 0.0;
  double tau_e = 0.0;
};

Xi make_xi(const std::array<double, kStateSize>& x, const AxisSignals& s, double tau_e_self_prev);

// Unencrypted controller for one axis of one node.
class PlainAxisController {
 public:
  explicit PlainAxisController(ControllerMatrices m) : m_(std::move(m)) {}

  ControllerOutput step(const AxisSignals& s);
  // Evaluates with an externally supplied xi (state and inputs).
  ControllerOutput step_with_xi(const Xi& xi);

  const std::array<double, kStateSize>& state() const { return x_; }
  double tau_e_self_prev() const { return tau_e_prev_; }
  const Xi& last_xi() const { return last_xi_; }
  const ControllerMatrices& matrices() const { return m_; }

 private:
  ControllerMatrices m_;
  std::array<double, kStateSize> x_{};
  double tau_e_prev_ = 0.0;
  Xi last_xi_{};
};

}  // namespace etel

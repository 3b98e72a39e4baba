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

#include "etel/controller.hpp"

#include <Eigen/LU>

#include <cstdio>
#include <limits>
#include <sstream>

#include "etel/errors.hpp"

namespace etel {

ControllerMatrices assemble_phi(const ControllerGains& g, const MotorParams& m) {
  g.validate();
  m.validate();
  const DiscreteObserver dob = build_dob(g, m);
  const DiscreteObserver rfob = build_rfob(g, m);

  // Tustin-filtered PD on e = theta_other - theta_self.
  const double den = 2.0 + g.g_p * g.t_s;
  const double a_p = (2.0 - g.g_p * g.t_s) / den;
  const double c_p = 2.0 * g.g_p / den;
  const double acc = m.j_bar / (2.0 * m.k_t);  // acceleration reference -> current
  const double k = m.k_t;

  ControllerMatrices out;
  PhiMatrix& p = out.phi;

  // e_{k+1} = theta_other - theta_self
  p(0, kXiThetaOther) = 1.0;
  p(0, kXiThetaSelf) = -1.0;

  // edot_{k+1} = -c_p e + a_p edot + c_p (theta_other - theta_self)
  p(1, kXiE) = -c_p;
  p(1, kXiEdot) = a_p;
  p(1, kXiThetaOther) = c_p;
  p(1, kXiThetaSelf) = -c_p;

  // q_{k+1}
  p(2, kXiQ) = dob.a;
  p(2, kXiI) = dob.b[0];
  p(2, kXiOmega) = dob.b[1];

  // z_{k+1}
  p(3, kXiZ) = rfob.a;
  p(3, kXiI) = rfob.b[0];
  p(3, kXiOmega) = rfob.b[1];
  p(3, kXiF) = rfob.b[2];

  // i_{k+1} = J/(2K) thdd_ref + tau_d/K - K_f/(2K) (tau_e_other + tau_e_self)
  p(4, kXiE) = acc * (-g.k_d * c_p);
  p(4, kXiEdot) = acc * g.k_d * a_p;
  p(4, kXiQ) = dob.c / k;
  p(4, kXiI) = dob.d[0] / k;
  p(4, kXiThetaOther) = acc * (g.k_p + g.k_d * c_p);
  p(4, kXiThetaSelf) = -acc * (g.k_p + g.k_d * c_p);
  p(4, kXiOmega) = dob.d[1] / k;
  p(4, kXiTauOther) = -g.k_f / (2.0 * k);
  p(4, kXiTauSelf) = -g.k_f / (2.0 * k);

  // tau_d
  p(5, kXiQ) = dob.c;
  p(5, kXiI) = dob.d[0];
  p(5, kXiOmega) = dob.d[1];

  // tau_e
  p(6, kXiZ) = rfob.c;
  p(6, kXiI) = rfob.d[0];
  p(6, kXiOmega) = rfob.d[1];
  p(6, kXiF) = rfob.d[2];
  return out;
}

Psi eval_plain(const ControllerMatrices& c, const Xi& xi) {
  Psi psi{};
  for (int i = 0; i < kPsiSize; ++i) {
    double acc = 0.0;
    for (int j = 0; j < kXiSize; ++j) acc += c.phi(i, j) * xi[j];
    psi[i] = acc;
  }
  return psi;
}

std::string format_phi(const ControllerMatrices& c) {
  std::ostringstream os;
  char buf[32];
  for (int i = 0; i < kPsiSize; ++i) {
    for (int j = 0; j < kXiSize; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", c.phi(i, j));
      os << (j ? " " : "") << buf;
    }
    os << "\n";
  }
  return os.str();
}

int observability_rank(const MotorParams& m, const std::array<double, 2>& c) {
  if (m.j_bar == 0.0) throw DomainError("observability: J_bar = 0 gives a singular model");
  // x = [omega, tau_d]:  omega' = (K i - tau_d) / J,  tau_d' = 0.
  Eigen::Matrix2d a;
  a << 0.0, -1.0 / m.j_bar, 0.0, 0.0;
  Eigen::RowVector2d cr(c[0], c[1]);
  Eigen::Matrix2d o;
  o.row(0) = cr;
  o.row(1) = cr * a;
  Eigen::FullPivLU<Eigen::Matrix2d> lu(o);
  lu.setThreshold(std::numeric_limits<double>::denorm_min());
  return static_cast<int>(lu.rank());
}

int observability_check(const MotorParams& m) { return observability_rank(m, {1.0, 0.0}); }

Xi make_xi(const std::array<double, kStateSize>& x, const AxisSignals& s, double tau_e_self_prev) {
  Xi xi{};
  for (int j = 0; j < kStateSize; ++j) xi[j] = x[j];
  xi[kXiThetaOther] = s.theta_other;
  xi[kXiThetaSelf] = s.theta_self;
  xi[kXiOmega] = s.omega;
  xi[kXiTauOther] = s.tau_e_other;
  xi[kXiTauSelf] = tau_e_self_prev;
  xi[kXiF] = s.f;
  return xi;
}

ControllerOutput PlainAxisController::step(const AxisSignals& s) {
  return step_with_xi(make_xi(x_, s, tau_e_prev_));
}

ControllerOutput PlainAxisController::step_with_xi(const Xi& xi) {
  last_xi_ = xi;
  const Psi psi = eval_plain(m_, xi);
  for (int j = 0; j < kStateSize; ++j) x_[j] = psi[j];
  tau_e_prev_ = psi[kPsiTauE];
  return {psi[kPsiCurrent], psi[kPsiTauD], psi[kPsiTauE]};
}

}  // namespace etel

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

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "etel/controller.hpp"
#include "etel/errors.hpp"
#include "support/scalar_controller.hpp"

using namespace etel;

TEST_CASE("printed closed-form entries") {
  const ControllerGains g = ControllerGains::yaw();
  const MotorParams m = MotorParams::yaw();
  const PhiMatrix& p = assemble_phi(g, m).phi;
  CHECK(p.rows() == 7);
  CHECK(p.cols() == 11);
  CHECK(p(kXiEdot, kXiEdot) == doctest::Approx(-1.0 / 3.0));
  CHECK(p(kPsiCurrent, kXiTauOther) == doctest::Approx(-1.0));
  CHECK(p(kPsiCurrent, kXiTauSelf) == doctest::Approx(-1.0));
  // e_{k+1} = theta_other - theta_self, nothing else
  for (int j = 0; j < kXiSize; ++j)
    CHECK(p(kXiE, j) == (j == kXiThetaOther ? 1.0 : j == kXiThetaSelf ? -1.0 : 0.0));
  // position error gain J/(2K) (K_p + 2 K_d g_p/(2 + g_p T))
  CHECK(p(kPsiCurrent, kXiThetaOther) ==
        doctest::Approx(m.j_bar / (2 * m.k_t) * (300.0 + 2 * 300.0 * 200.0 / 6.0)));
  // tau_d row never sees the remote or the position states
  for (int j : {kXiE, kXiEdot, kXiZ, kXiThetaOther, kXiThetaSelf, kXiTauOther, kXiTauSelf, kXiF})
    CHECK(p(kPsiTauD, j) == 0.0);
}

TEST_CASE("zero gains remove position and force paths") {
  ControllerGains g = ControllerGains::yaw();
  g.k_p = g.k_d = g.k_f = 0.0;
  const PhiMatrix& p = assemble_phi(g, MotorParams::yaw()).phi;
  for (int j : {kXiE, kXiEdot, kXiThetaOther, kXiThetaSelf, kXiTauOther, kXiTauSelf})
    CHECK(p(kPsiCurrent, j) == 0.0);
}

TEST_CASE("eval_plain against a naive product") {
  const ControllerMatrices c = assemble_phi(ControllerGains::pitch(), MotorParams::pitch());
  Xi zero{};
  for (double v : eval_plain(c, zero)) CHECK(v == 0.0);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    Xi xi;
    for (double& v : xi) v = u(rng);
    Psi got = eval_plain(c, xi);
    for (int i = 0; i < kPsiSize; ++i) {
      long double want = 0, mag = 0;
      for (int j = 0; j < kXiSize; ++j) {
        want += static_cast<long double>(c.phi(i, j)) * xi[j];
        mag += std::abs(static_cast<long double>(c.phi(i, j)) * xi[j]);
      }
      CHECK(std::abs(got[i] - static_cast<double>(want)) <= 16 * 0x1p-52 * static_cast<double>(mag));
    }
  }
  for (int j = 0; j < kXiSize; ++j) {
    Xi e{};
    e[j] = 1.0;
    Psi col = eval_plain(c, e);
    for (int i = 0; i < kPsiSize; ++i) CHECK(col[i] == c.phi(i, j));
  }
}

TEST_CASE("one matrix serves both ends") {
  // Leader and follower evaluate the same matrix; only the (other, self)
  // ordering of the inputs differs.
  const ControllerMatrices c = assemble_phi(ControllerGains::yaw(), MotorParams::yaw());
  PlainAxisController leader(c), follower(c);
  std::array<double, kStateSize> zero{};
  AxisSignals sl{0.3, 0.1, 0.0, 0.02, 0.8}, sf{0.1, 0.3, 0.0, 0.05, 0.8};
  Xi xl = make_xi(zero, sl, 0.05), xf = make_xi(zero, sf, 0.02);
  CHECK(xl[kXiThetaOther] == xf[kXiThetaSelf]);
  CHECK(xl[kXiTauOther] == xf[kXiTauSelf]);
  Psi pl = eval_plain(c, xl), pf = eval_plain(c, xf);
  // position terms flip sign, force terms are shared
  CHECK(pl[kXiE] == -pf[kXiE]);
  CHECK(pl[kPsiCurrent] - pf[kPsiCurrent] ==
        doctest::Approx(2 * c.phi(kPsiCurrent, kXiThetaOther) * (0.3 - 0.1)));
}

TEST_CASE("matrix controller equals the scalar recurrences on a stream") {
  for (AxisId a : kAxes) {
    const ControllerGains g = ControllerGains::for_axis(a);
    const MotorParams m = MotorParams::for_axis(a);
    PlainAxisController pc(assemble_phi(g, m));
    testing::ScalarController sc(g, m);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double max_di = 0.0, tau_other = 0.0;
    for (int k = 0; k < 2000; ++k) {
      AxisSignals s{u(rng), u(rng), 5 * u(rng), tau_other, u(rng)};
      double a_i = pc.step(s).current;
      double b_i = sc.step(s.theta_other, s.theta_self, s.omega, s.tau_e_other, s.f);
      CHECK(sc.tau_e_prev() == doctest::Approx(pc.tau_e_self_prev()).epsilon(1e-9));
      max_di = std::max(max_di, std::abs(a_i - b_i));
      tau_other = 0.1 * u(rng);
    }
    CHECK(max_di <= 1e-10);
  }
}

TEST_CASE("closed loop currents: matrix vs scalar recurrences, 20 s") {
  OperatorModel hand;
  hand.k_h = {1.0, 1.0};
  hand.b_h = {0.05, 0.05};
  hand.reference = {Trajectory({{0, 0}, {2.5, deg2rad(60)}, {7.5, deg2rad(-60)}, {12.5, deg2rad(60)}, {17.5, deg2rad(-60)}, {20, 0}}),
                    Trajectory({{0, deg2rad(45)}, {2.5, deg2rad(70)}, {7.5, deg2rad(20)}, {12.5, deg2rad(70)}, {17.5, deg2rad(20)}, {20, deg2rad(45)}})};
  auto r = testing::closed_loop_equivalence(20.0, hand, {0.0, deg2rad(45)});
  CHECK(r.steps == 1000);
  CHECK(r.max_current > 0.0);
  CHECK(r.max_di <= 1e-10);
}

TEST_CASE("observability") {
  CHECK(observability_check(MotorParams::yaw()) == 2);
  CHECK(observability_check(MotorParams::pitch()) == 2);
  CHECK(observability_check(MotorParams::nominal(1e12, 0.5)) == 2);
  CHECK(observability_rank(MotorParams::yaw(), {0.0, 1.0}) == 1);
  CHECK(observability_rank(MotorParams::yaw(), {0.0, 0.0}) == 0);
  CHECK_THROWS_AS(observability_check(MotorParams{0.0, 0.5, 1.0, 0.5}), DomainError);
}

TEST_CASE("format_phi prints 7 rows of 11 round-tripping numbers") {
  const ControllerMatrices c = assemble_phi(ControllerGains::yaw(), MotorParams::yaw());
  std::istringstream in(format_phi(c));
  for (int i = 0; i < kPsiSize; ++i)
    for (int j = 0; j < kXiSize; ++j) {
      double v;
      in >> v;
      CHECK(v == c.phi(i, j));
    }
  double extra;
  CHECK_FALSE(static_cast<bool>(in >> extra));
}

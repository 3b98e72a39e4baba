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

#include "etel/errors.hpp"
#include "etel/plant.hpp"

using namespace etel;

namespace {

// Coefficients exactly as published for the test bench.
NonlinearTermParams published() {
  NonlinearTermParams p;
  p.yaw = {0.0009979, 0.03152, 0.05736, 12.98, 1.275, 0.7802};
  p.pitch = {0.4696, 0.01893, 1.575, 0.009764, -1197.0, 0.0, 0.05194, 0.003254};
  return p;
}

AxisState integrate(AxisState s, const MotorParams& m, const NonlinearTermParams& nl, AxisId axis, double i,
                    const AppliedTorque& ext, double t_end, double dt) {
  const int n = static_cast<int>(std::lround(t_end / dt));
  for (int k = 0; k < n; ++k) s = step_dynamics(s, m, nl, axis, i, ext, k * dt, dt);
  return s;
}

}  // namespace

TEST_CASE("default coefficients are the published set") {
  NonlinearTermParams a = NonlinearTermParams::identified(), b = published();
  CHECK(a.yaw.a_c == b.yaw.a_c);
  CHECK(a.yaw.d_f1 == b.yaw.d_f1);
  CHECK(a.pitch.b_f2 == b.pitch.b_f2);
  CHECK(a.pitch.e_f2 == b.pitch.e_f2);
  CHECK(a.pitch.c_g == b.pitch.c_g);
}

TEST_CASE("nonlinear torque by direct evaluation") {
  CHECK(nonlinear_torque(NonlinearTermParams::zero(), AxisId::kYaw, 0.3, 1.0) == 0.0);
  CHECK(nonlinear_torque(NonlinearTermParams::zero(), AxisId::kPitch, 0.3, 1.0) == 0.0);

  const NonlinearTermParams p = published();
  CHECK(nonlinear_torque(p, AxisId::kYaw, 0.0, 0.0) == doctest::Approx(0.8637).epsilon(1e-4));
  CHECK(nonlinear_torque(p, AxisId::kPitch, 0.0, 0.0) == doctest::Approx(0.4729).epsilon(1e-4));

  // angle enters in degrees: 30 deg, 0.4 rad/s
  const double th = 30.0 * M_PI / 180.0, w = 0.4;
  double yaw = 0.0009979 * 30.0 + 0.03152 + 0.05736 * std::atan(12.98 * w + 1.275) + 0.7802;
  double pitch = 0.4696 * std::sin(0.01893 * 30.0 + 1.575) + 0.009764 * std::atan(-1197.0 * w) + 0.05194 * w + 0.003254;
  CHECK(nonlinear_torque(p, AxisId::kYaw, th, w) == doctest::Approx(yaw).epsilon(1e-13));
  CHECK(nonlinear_torque(p, AxisId::kPitch, th, w) == doctest::Approx(pitch).epsilon(1e-13));
  CHECK(nonlinear_torque(p, AxisId::kPitch, th, w, FrictionModel::kNone) ==
        doctest::Approx(0.4696 * std::sin(0.01893 * 30.0 + 1.575)).epsilon(1e-13));
}

TEST_CASE("environment spring-damper") {
  EnvironmentModel env{true, AxisId::kYaw, 0.2, 100.0, 0.5};
  CHECK(environment_torque(env, 0.1, 1.0) == 0.0);
  CHECK(environment_torque(env, 0.2, 1.0) == 0.0);
  CHECK(environment_torque(env, 0.25, 0.0) == doctest::Approx(-5.0));
  // nonpositive power while pressing in
  for (double w : {0.01, 0.1, 1.0}) CHECK(environment_torque(env, 0.21, w) * w <= 0.0);
  env.enabled = false;
  CHECK(environment_torque(env, 0.25, 0.0) == 0.0);
  CHECK(EnvironmentModel::aluminum(0).stiffness > EnvironmentModel::sponge(0).stiffness);
}

TEST_CASE("operator virtual hand") {
  OperatorModel op;
  op.k_h = {10.0, 10.0};
  op.b_h = {0.5, 0.5};
  op.reference = {Trajectory::constant(0.3), Trajectory::constant(0.5)};
  CHECK(operator_torque(op, AxisId::kYaw, 1.0, 0.3, 0.0) == 0.0);
  CHECK(operator_torque(op, AxisId::kYaw, 1.0, 0.2, 0.0) == doctest::Approx(1.0));
  CHECK(operator_torque(op, AxisId::kPitch, 1.0, 0.5, 2.0) == doctest::Approx(-1.0));
  CHECK(operator_torque(op, AxisId::kPitch, 1.0, 0.5, -2.0) == doctest::Approx(1.0));
}

TEST_CASE("trajectory quintic blend") {
  Trajectory tr({{0.0, 0.0}, {1.0, 1.0}, {3.0, -1.0}});
  CHECK(tr(-1.0) == 0.0);
  CHECK(tr(0.5) == doctest::Approx(0.5));
  CHECK(tr(1.0) == doctest::Approx(1.0));
  CHECK(tr(2.0) == doctest::Approx(0.0));
  CHECK(tr(5.0) == -1.0);
  // zero slope at knots
  CHECK(std::abs(tr(1.0 + 1e-6) - tr(1.0)) < 1e-9);
  CHECK_THROWS_AS(Trajectory(std::vector<Trajectory::Knot>{}), ConfigError);
  CHECK_THROWS_AS(Trajectory({{1.0, 0.0}, {1.0, 1.0}}), ConfigError);
}

TEST_CASE("equilibrium without inputs") {
  const MotorParams m = MotorParams::yaw();
  AxisState s{0.4, 0.0};
  AxisState out = integrate(s, m, NonlinearTermParams::zero(), AxisId::kYaw, 0.0, nullptr, 1.0, 0.002);
  CHECK(out.theta == 0.4);
  CHECK(out.omega == 0.0);
}

TEST_CASE("constant current on the nominal plant is a double integrator") {
  const MotorParams m = MotorParams::yaw();
  const double i = 0.01, t = 0.5, acc = m.k_t / m.j_bar * i;
  AxisState out = integrate({0.0, 0.0}, m, NonlinearTermParams::zero(), AxisId::kYaw, i, nullptr, t, 0.002);
  CHECK(out.omega == doctest::Approx(acc * t).epsilon(1e-6));
  CHECK(out.theta == doctest::Approx(0.5 * acc * t * t).epsilon(1e-6));
}

TEST_CASE("RK4 converges at fourth order") {
  MotorParams m = MotorParams::nominal(1e-3, 0.5);
  // nonlinear spring: J th'' = -sin(th)*0.1
  AppliedTorque spring = [](double, double th, double) { return -0.1 * std::sin(th); };
  AxisState s0{1.0, 0.0};
  const double t = 2.0;
  AxisState ref = integrate(s0, m, NonlinearTermParams::zero(), AxisId::kYaw, 0.0, spring, t, 1e-5);
  double e1 = std::abs(integrate(s0, m, NonlinearTermParams::zero(), AxisId::kYaw, 0.0, spring, t, 4e-3).theta - ref.theta);
  double e2 = std::abs(integrate(s0, m, NonlinearTermParams::zero(), AxisId::kYaw, 0.0, spring, t, 2e-3).theta - ref.theta);
  CHECK(e1 / e2 == doctest::Approx(16.0).epsilon(0.15));
}

TEST_CASE("free rotation conserves kinetic energy") {
  const MotorParams m = MotorParams::yaw();
  AxisState s{0.0, 0.7};
  const double e0 = 0.5 * m.j_true * s.omega * s.omega;
  s = integrate(s, m, NonlinearTermParams::zero(), AxisId::kYaw, 0.0, nullptr, 20.0, 0.002);
  CHECK(std::abs(0.5 * m.j_true * s.omega * s.omega - e0) <= 1e-8 * e0);
  CHECK(s.theta == doctest::Approx(14.0).epsilon(1e-9));
}

TEST_CASE("modelling error enters through J and K") {
  MotorParams m{1e-4, 0.5, 2e-4, 0.25};
  AxisState out = step_dynamics({0.0, 0.0}, m, NonlinearTermParams::zero(), AxisId::kYaw, 1.0, nullptr, 0.0, 1e-3);
  CHECK(out.omega == doctest::Approx(0.25 / 2e-4 * 1e-3));
  CHECK_THROWS_AS(step_dynamics({}, m, NonlinearTermParams::zero(), AxisId::kYaw, 0.0, nullptr, 0.0, 0.0), DomainError);
  CHECK_THROWS_AS((MotorParams{0.0, 1.0, 1.0, 1.0}.validate()), ConfigError);
}

TEST_CASE("arm clamps at the soft limits and counts per axis") {
  Arm arm({MotorParams::yaw(), MotorParams::pitch()}, NonlinearTermParams::zero());
  ArmState s;
  s[AxisId::kYaw] = {deg2rad(119.0), 2.0};
  s[AxisId::kPitch] = {deg2rad(45.0), 0.0};
  arm.set_state(s);
  arm.advance({0.0, 0.0}, {nullptr, nullptr}, 0.0, 0.02, 10);
  CHECK(arm.state()[AxisId::kYaw].theta == doctest::Approx(deg2rad(120.0)));
  CHECK(arm.clamp_count(AxisId::kYaw) >= 1);
  CHECK(arm.clamp_count(AxisId::kPitch) == 0);
  CHECK(arm.clamp_count() == arm.clamp_count(AxisId::kYaw));
  REQUIRE_FALSE(arm.clamp_events().empty());
  CHECK(arm.clamp_events().front().axis == AxisId::kYaw);
}

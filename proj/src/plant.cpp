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

#include "etel/plant.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "etel/errors.hpp"

namespace etel {

const char* axis_name(AxisId axis) { return axis == AxisId::kYaw ? "yaw" : "pitch"; }

MotorParams MotorParams::yaw() { return nominal(1.37e-4, 0.5); }
MotorParams MotorParams::pitch() { return nominal(4.1e-5, 0.5106); }

void MotorParams::validate() const {
  if (!(j_bar > 0 && k_t > 0 && j_true > 0 && k_true > 0))
    throw ConfigError("motor: inertias and torque coefficients must be positive");
}

NonlinearTermParams NonlinearTermParams::identified() {
  NonlinearTermParams p;
  p.yaw = {0.0009979, 0.03152, 0.05736, 12.98, 1.275, 0.7802};
  p.pitch = {0.4696, 0.01893, 1.575, 0.009764, -1197.0, 0.0, 0.05194, 0.003254};
  return p;
}

double static_torque(const NonlinearTermParams& p, AxisId axis, double theta) {
  const double th = rad2deg(theta);
  if (axis == AxisId::kYaw) return p.yaw.a_c * th + p.yaw.b_c;
  return p.pitch.a_g * std::sin(p.pitch.b_g * th + p.pitch.c_g);
}

double friction_torque(const NonlinearTermParams& p, AxisId axis, double omega) {
  if (axis == AxisId::kYaw) return p.yaw.a_f1 * std::atan(p.yaw.b_f1 * omega + p.yaw.c_f1) + p.yaw.d_f1;
  const PitchTerms& t = p.pitch;
  return t.a_f2 * std::atan(t.b_f2 * omega + t.c_f2) + t.d_f2 * omega + t.e_f2;
}

double nonlinear_torque(const NonlinearTermParams& p, AxisId axis, double theta, double omega,
                        FrictionModel model) {
  const double fr = model == FrictionModel::kNone ? 0.0 : friction_torque(p, axis, omega);
  return static_torque(p, axis, theta) + fr;
}

SoftLimits SoftLimits::for_axis(AxisId axis) {
  if (axis == AxisId::kYaw) return {deg2rad(-120.0), deg2rad(120.0)};
  return {deg2rad(10.0), deg2rad(80.0)};
}

EnvironmentModel EnvironmentModel::aluminum(double contact_angle) {
  return {true, AxisId::kYaw, contact_angle, 500.0, 0.5};
}

EnvironmentModel EnvironmentModel::sponge(double contact_angle) {
  return {true, AxisId::kYaw, contact_angle, 20.0, 0.5};
}

double environment_torque(const EnvironmentModel& env, double theta, double omega) {
  if (!env.enabled || theta <= env.contact_angle) return 0.0;
  return -env.stiffness * (theta - env.contact_angle) - env.damping * omega;
}

Trajectory::Trajectory(std::vector<Knot> knots) : knots_(std::move(knots)) {
  if (knots_.empty()) throw ConfigError("trajectory: no knots");
  for (std::size_t i = 1; i < knots_.size(); ++i)
    if (!(knots_[i].t > knots_[i - 1].t)) throw ConfigError("trajectory: knot times must increase");
}

double Trajectory::operator()(double t) const {
  if (knots_.empty()) return 0.0;
  if (t <= knots_.front().t) return knots_.front().theta;
  if (t >= knots_.back().t) return knots_.back().theta;
  auto it = std::upper_bound(knots_.begin(), knots_.end(), t,
                             [](double v, const Knot& k) { return v < k.t; });
  const Knot& b = *it;
  const Knot& a = *(it - 1);
  double u = (t - a.t) / (b.t - a.t);
  double s = u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
  return a.theta + (b.theta - a.theta) * s;
}

double operator_torque(const OperatorModel& op, AxisId axis, double t, double theta, double omega) {
  const std::size_t i = index(axis);
  return op.k_h[i] * (op.reference[i](t) - theta) - op.b_h[i] * omega;
}

AxisState step_dynamics(const AxisState& s, const MotorParams& motor, const NonlinearTermParams& nl,
                        AxisId axis, double current, const AppliedTorque& applied, double t, double dt,
                        FrictionModel friction) {
  if (!(dt > 0)) throw DomainError("step_dynamics: dt must be positive");
  const double drive = motor.k_true * current;
  auto accel = [&](double tt, double th, double w) {
    double ext = applied ? applied(tt, th, w) : 0.0;
    return (drive - nonlinear_torque(nl, axis, th, w, friction) + ext) / motor.j_true;
  };
  const double h = dt;
  const double k1x = s.omega;
  const double k1v = accel(t, s.theta, s.omega);
  const double k2x = s.omega + 0.5 * h * k1v;
  const double k2v = accel(t + 0.5 * h, s.theta + 0.5 * h * k1x, k2x);
  const double k3x = s.omega + 0.5 * h * k2v;
  const double k3v = accel(t + 0.5 * h, s.theta + 0.5 * h * k2x, k3x);
  const double k4x = s.omega + h * k3v;
  const double k4v = accel(t + h, s.theta + h * k3x, k4x);
  AxisState out;
  out.theta = s.theta + h / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x);
  out.omega = s.omega + h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
  return out;
}

Arm::Arm(std::array<MotorParams, kAxisCount> motors, NonlinearTermParams truth, FrictionModel friction)
    : motors_(motors), truth_(truth), friction_(friction) {
  for (const auto& m : motors_) m.validate();
}

void Arm::advance(const std::array<double, kAxisCount>& currents,
                  const std::array<AppliedTorque, kAxisCount>& applied, double t, double period,
                  int substeps) {
  if (substeps < 1) throw DomainError("Arm::advance: substeps must be >= 1");
  const double dt = period / substeps;
  for (AxisId axis : kAxes) {
    const std::size_t i = index(axis);
    AxisState s = state_.axes[i];
    const SoftLimits lim = SoftLimits::for_axis(axis);
    for (int k = 0; k < substeps; ++k) {
      const double tk = t + k * dt;
      s = step_dynamics(s, motors_[i], truth_, axis, currents[i], applied[i], tk, dt, friction_);
      if (!limits_enabled_) continue;
      if (s.theta > lim.hi || s.theta < lim.lo) {
        if (events_.size() < 1000) events_.push_back({tk + dt, axis, s.theta});
        ++clamp_count_[i];
        if (s.theta > lim.hi) {
          s.theta = lim.hi;
          s.omega = std::min(s.omega, 0.0);
        } else {
          s.theta = lim.lo;
          s.omega = std::max(s.omega, 0.0);
        }
      }
    }
    state_.axes[i] = s;
  }
}

}  // namespace etel

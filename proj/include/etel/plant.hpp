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
#include <functional>
#include <string>
#include <vector>

namespace etel {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double deg2rad(double d) { return d * kPi / 180.0; }
inline constexpr double rad2deg(double r) { return r * 180.0 / kPi; }

enum class AxisId : int { kYaw = 0, kPitch = 1 };
inline constexpr std::size_t kAxisCount = 2;
inline constexpr std::array<AxisId, kAxisCount> kAxes{AxisId::kYaw, AxisId::kPitch};
const char* axis_name(AxisId axis);
inline std::size_t index(AxisId axis) { return static_cast<std::size_t>(axis); }

struct MotorParams {
  double j_bar = 0.0;   // nominal inertia, kg m^2
  double k_t = 0.0;     // nominal torque coefficient, Nm/A
  double j_true = 0.0;  // plant inertia
  double k_true = 0.0;  // plant torque coefficient

  static MotorParams nominal(double j_bar, double k_t) { return {j_bar, k_t, j_bar, k_t}; }
  // Default yaw / pitch motors with nominal plants.
  static MotorParams yaw();
  static MotorParams pitch();
  static MotorParams for_axis(AxisId axis) { return axis == AxisId::kYaw ? yaw() : pitch(); }
  void validate() const;
};

// Identified disturbance model. Angles enter in degrees, velocities in rad/s.
//   yaw:   a_c*th + b_c + a_f1*atan(b_f1*w + c_f1) + d_f1
//   pitch: a_g*sin(b_g*th + c_g) + a_f2*atan(b_f2*w + c_f2) + d_f2*w + e_f2
struct YawTerms {
  double a_c = 0, b_c = 0, a_f1 = 0, b_f1 = 0, c_f1 = 0, d_f1 = 0;
};
struct PitchTerms {
  double a_g = 0, b_g = 0, c_g = 0, a_f2 = 0, b_f2 = 0, c_f2 = 0, d_f2 = 0, e_f2 = 0;
};
struct NonlinearTermParams {
  YawTerms yaw;
  PitchTerms pitch;

  static NonlinearTermParams identified();  // the published coefficient set
  static NonlinearTermParams zero() { return {}; }
};

// kSmooth evaluates the fitted friction curve everywhere, including w = 0.
// kNone drops the friction terms: a joint held at rest feels only cable
// tension / gravity. (Fading friction in near w = 0 instead makes the model
// numerically stiff: neither fitted curve is odd in w.)
enum class FrictionModel { kSmooth, kNone };

double static_torque(const NonlinearTermParams& p, AxisId axis, double theta);
double friction_torque(const NonlinearTermParams& p, AxisId axis, double omega);
// f(theta, omega); theta in rad (converted to degrees internally).
double nonlinear_torque(const NonlinearTermParams& p, AxisId axis, double theta, double omega,
                        FrictionModel model = FrictionModel::kSmooth);

struct AxisState {
  double theta = 0.0;
  double omega = 0.0;
};

struct ArmState {
  std::array<AxisState, kAxisCount> axes{};
  AxisState& operator[](AxisId a) { return axes[index(a)]; }
  const AxisState& operator[](AxisId a) const { return axes[index(a)]; }
};

struct SoftLimits {
  double lo = 0.0;
  double hi = 0.0;
  static SoftLimits for_axis(AxisId axis);
};

struct EnvironmentModel {
  bool enabled = false;
  AxisId axis = AxisId::kYaw;
  double contact_angle = 0.0;  // rad
  double stiffness = 0.0;      // Nm/rad
  double damping = 0.0;        // Nm s/rad

  static EnvironmentModel aluminum(double contact_angle);
  static EnvironmentModel sponge(double contact_angle);
};

// Torque applied to the arm by the object (<= 0 while penetrating).
double environment_torque(const EnvironmentModel& env, double theta, double omega);

// Piecewise reference: quintic blends between (time, angle) knots, flat
// before the first and after the last knot.
class Trajectory {
 public:
  struct Knot {
    double t;
    double theta;
  };
  Trajectory() = default;
  explicit Trajectory(std::vector<Knot> knots);
  static Trajectory constant(double theta) { return Trajectory({{0.0, theta}}); }
  double operator()(double t) const;
  const std::vector<Knot>& knots() const { return knots_; }

 private:
  std::vector<Knot> knots_;
};

struct OperatorModel {
  std::array<double, kAxisCount> k_h{};  // Nm/rad
  std::array<double, kAxisCount> b_h{};  // Nm s/rad
  std::array<Trajectory, kAxisCount> reference{};
};

// K_h (ref(t) - theta) - B_h omega: torque applied to the leader by the hand.
double operator_torque(const OperatorModel& op, AxisId axis, double t, double theta, double omega);

// Torque applied to an axis from outside the motor (hand or object).
using AppliedTorque = std::function<double(double t, double theta, double omega)>;

// Single RK4 step of J theta'' = K i - f(theta, omega) + applied.
AxisState step_dynamics(const AxisState& s, const MotorParams& motor, const NonlinearTermParams& nl,
                        AxisId axis, double current, const AppliedTorque& applied, double t, double dt,
                        FrictionModel friction = FrictionModel::kSmooth);

struct ClampEvent {
  double t;
  AxisId axis;
  double theta;  // angle before clamping
};

// One robot arm (both axes) with soft limits. Owned by exactly one node.
class Arm {
 public:
  Arm(std::array<MotorParams, kAxisCount> motors, NonlinearTermParams truth,
      FrictionModel friction = FrictionModel::kSmooth);

  const ArmState& state() const { return state_; }
  void set_state(const ArmState& s) { state_ = s; }
  const MotorParams& motor(AxisId a) const { return motors_[index(a)]; }
  const NonlinearTermParams& truth() const { return truth_; }

  void set_limits_enabled(bool on) { limits_enabled_ = on; }

  // Zero-order hold of `currents` over [t, t + period], `substeps` RK4 steps.
  void advance(const std::array<double, kAxisCount>& currents,
               const std::array<AppliedTorque, kAxisCount>& applied, double t, double period,
               int substeps);

  const std::vector<ClampEvent>& clamp_events() const { return events_; }
  std::size_t clamp_count() const { return clamp_count_[0] + clamp_count_[1]; }
  std::size_t clamp_count(AxisId a) const { return clamp_count_[index(a)]; }

 private:
  std::array<MotorParams, kAxisCount> motors_;
  NonlinearTermParams truth_;
  FrictionModel friction_;
  ArmState state_{};
  bool limits_enabled_ = true;
  std::vector<ClampEvent> events_;
  std::array<std::size_t, kAxisCount> clamp_count_{};
};

}  // namespace etel

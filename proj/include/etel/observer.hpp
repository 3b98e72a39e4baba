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

#include "etel/plant.hpp"

namespace etel {

struct ControllerGains {
  double k_p = 0.0;
  double k_d = 0.0;
  double k_f = 0.0;
  double g_p = 200.0;  // rad/s, pseudo-differentiator and PD low-pass
  double g_d = 100.0;  // rad/s, disturbance observer
  double g_r = 100.0;  // rad/s, reaction force observer
  double t_s = 0.02;   // s

  static ControllerGains yaw() { return {300.0, 300.0, 1.0, 200.0, 100.0, 100.0, 0.02}; }
  static ControllerGains pitch() { return {120.0, 80.0, 1.0, 200.0, 100.0, 100.0, 0.02}; }
  static ControllerGains for_axis(AxisId axis) { return axis == AxisId::kYaw ? yaw() : pitch(); }
  void validate() const;
};

// Scalar-state system with up to three inputs, ordered (i, w, f):
//   x' = a x + b.u,   y = c x + d.u
struct FirstOrderSystem {
  double a = 0.0;
  std::array<double, 3> b{};
  double c = 0.0;
  std::array<double, 3> d{};
};

// Discrete counterpart: x[k+1] = a x[k] + b.u[k],  y[k] = c x[k] + d.u[k].
class DiscreteObserver {
 public:
  double a = 0.0;
  std::array<double, 3> b{};
  double c = 0.0;
  std::array<double, 3> d{};
  double state = 0.0;

  double output(const std::array<double, 3>& u) const {
    return c * state + d[0] * u[0] + d[1] * u[1] + d[2] * u[2];
  }
  // Returns y[k] and advances the state to k+1.
  double step(const std::array<double, 3>& u) {
    double y = output(u);
    state = a * state + b[0] * u[0] + b[1] * u[1] + b[2] * u[2];
    return y;
  }
  void reset(double x = 0.0) { state = x; }
};

// Bilinear (Tustin) transform, s = (2/T)(z-1)/(z+1).
DiscreteObserver tustin(const FirstOrderSystem& sys, double t_s);

// Continuous observers; inputs ordered (i, w, f).
FirstOrderSystem continuous_dob(const ControllerGains& g, const MotorParams& m);
FirstOrderSystem continuous_rfob(const ControllerGains& g, const MotorParams& m);
// g s / (s + g) acting on theta (input slot 0).
FirstOrderSystem continuous_pseudo_differentiator(double g_p);

DiscreteObserver build_pseudo_differentiator(double g_p, double t_s);
DiscreteObserver build_dob(const ControllerGains& g, const MotorParams& m);
DiscreteObserver build_rfob(const ControllerGains& g, const MotorParams& m);

// Velocity estimate from angle samples.
class PseudoDifferentiator {
 public:
  PseudoDifferentiator(double g_p, double t_s) : f_(build_pseudo_differentiator(g_p, t_s)) {}
  double step(double theta);
  void reset() {
    f_.reset();
    primed_ = false;
  }

 private:
  DiscreteObserver f_;
  bool primed_ = false;
};

}  // namespace etel

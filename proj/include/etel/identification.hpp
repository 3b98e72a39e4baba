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

#include <cstdint>
#include <string>
#include <vector>

#include "etel/plant.hpp"

namespace etel {

// Closed-loop identification of the nonlinear disturbance model. The arm is
// held by a PD loop with DOB compensation; the DOB estimate, averaged over
// the settled part of each hold or sweep, is the measured torque.
struct IdentificationOptions {
  AxisId axis = AxisId::kYaw;
  MotorParams motor = MotorParams::yaw();
  NonlinearTermParams truth = NonlinearTermParams::identified();
  double t_s = 0.005;
  double k_p = 400.0;  // 1/s^2
  double k_d = 40.0;   // 1/s
  double g_p = 200.0;
  double g_d = 100.0;
  double hold = 10.0;  // s per static angle
  int runs = 10;       // round trips per velocity
  double noise_sigma = 0.0;  // Nm, added to every recorded estimate
  std::uint64_t seed = 1;

  static IdentificationOptions for_axis(AxisId axis);
};

struct StaticPoint {
  double theta;   // rad
  double torque;  // Nm
};

struct VelocityPoint {
  double omega;   // commanded, rad/s
  double torque;  // Nm, static part removed
};

struct IdentificationDataset {
  AxisId axis = AxisId::kYaw;
  std::vector<StaticPoint> statics;
  std::vector<VelocityPoint> sweeps;
  std::size_t clamp_events = 0;    // soft-stop hits, total
  std::size_t startup_clamps = 0;  // of which before the first data window
};

// Hold angles: yaw -120..120 deg, pitch 10..80 deg, 10 deg apart.
std::vector<double> static_schedule(AxisId axis);
// Speeds: 0.05..0.5 by 0.05, then 0.6..1.0 by 0.1 rad/s.
std::vector<double> velocity_schedule();

IdentificationDataset run_static_test(const IdentificationOptions& o);
// `static_fit` supplies the already identified angle-dependent part.
IdentificationDataset run_velocity_test(const IdentificationOptions& o, const NonlinearTermParams& static_fit);

struct FitReport {
  bool ok = false;
  std::string error;
  NonlinearTermParams params;  // only the fitted axis is populated
  double rms_static = 0.0;
  double rms_sweep = 0.0;
};

FitReport fit_static(AxisId axis, const std::vector<StaticPoint>& data);
FitReport fit_friction(AxisId axis, const std::vector<VelocityPoint>& data, NonlinearTermParams base);

// Static test, static fit, velocity test, friction fit.
FitReport identify(const IdentificationOptions& o, IdentificationDataset* static_out = nullptr,
                   IdentificationDataset* sweep_out = nullptr);

// Relative error of every fitted coefficient of `axis`, keyed by name.
std::vector<std::pair<std::string, double>> coefficient_errors(AxisId axis, const NonlinearTermParams& fit,
                                                               const NonlinearTermParams& truth);

}  // namespace etel

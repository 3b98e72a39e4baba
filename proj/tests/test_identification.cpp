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

#include "etel/identification.hpp"

using namespace etel;

namespace {

double error_of(const std::vector<std::pair<std::string, double>>& errs, const std::string& name) {
  for (const auto& [k, v] : errs)
    if (k == name) return v;
  return NAN;
}

}  // namespace

TEST_CASE("test schedules") {
  auto yaw = static_schedule(AxisId::kYaw);
  REQUIRE(yaw.size() == 25);
  CHECK(rad2deg(yaw.front()) == doctest::Approx(-120.0));
  CHECK(rad2deg(yaw.back()) == doctest::Approx(120.0));
  auto pitch = static_schedule(AxisId::kPitch);
  REQUIRE(pitch.size() == 8);
  CHECK(rad2deg(pitch.front()) == doctest::Approx(10.0));
  CHECK(rad2deg(pitch.back()) == doctest::Approx(80.0));
  auto v = velocity_schedule();
  REQUIRE(v.size() == 15);
  CHECK(v[0] == doctest::Approx(0.05));
  CHECK(v[9] == doctest::Approx(0.5));
  CHECK(v[10] == doctest::Approx(0.6));
  CHECK(v[14] == doctest::Approx(1.0));
}

TEST_CASE("fits recover the model from exact curve samples") {
  const NonlinearTermParams truth = NonlinearTermParams::identified();
  for (AxisId a : kAxes) {
    std::vector<StaticPoint> s;
    for (double th : static_schedule(a)) s.push_back({th, static_torque(truth, a, th)});
    FitReport rs = fit_static(a, s);
    REQUIRE(rs.ok);
    std::vector<VelocityPoint> d;
    for (double w : velocity_schedule())
      for (double sign : {1.0, -1.0}) d.push_back({sign * w, friction_torque(truth, a, sign * w)});
    FitReport rf = fit_friction(a, d, rs.params);
    REQUIRE(rf.ok);
    for (const auto& [name, err] : coefficient_errors(a, rf.params, truth)) {
      INFO(axis_name(a), ".", name);
      CHECK(err < 1e-6);
    }
  }
}

TEST_CASE("fits report the canonical sign of sign-equivalent forms") {
  // a sin(x) == -a sin(x + pi) and a atan(u) == -a atan(-u): data generated
  // from the flipped forms must come back with a >= 0 and the published signs.
  const NonlinearTermParams truth = NonlinearTermParams::identified();
  NonlinearTermParams flipped = truth;
  flipped.pitch.a_g = -truth.pitch.a_g;
  flipped.pitch.c_g = truth.pitch.c_g + kPi;
  flipped.pitch.a_f2 = -truth.pitch.a_f2;
  flipped.pitch.b_f2 = -truth.pitch.b_f2;
  flipped.pitch.c_f2 = -truth.pitch.c_f2;
  std::vector<StaticPoint> s;
  for (double th : static_schedule(AxisId::kPitch)) s.push_back({th, static_torque(flipped, AxisId::kPitch, th)});
  FitReport rs = fit_static(AxisId::kPitch, s);
  std::vector<VelocityPoint> d;
  for (double w : velocity_schedule())
    for (double sign : {1.0, -1.0}) d.push_back({sign * w, friction_torque(flipped, AxisId::kPitch, sign * w)});
  FitReport rf = fit_friction(AxisId::kPitch, d, rs.params);
  REQUIRE(rf.ok);
  CHECK(rf.params.pitch.a_g > 0.0);
  CHECK(std::abs(rf.params.pitch.c_g) <= kPi);
  CHECK(rf.params.pitch.a_f2 > 0.0);
  for (const auto& [name, err] : coefficient_errors(AxisId::kPitch, rf.params, truth)) {
    INFO(name);
    CHECK(err < 1e-6);
  }
}

TEST_CASE("fit errors are reported, not thrown") {
  FitReport a = fit_static(AxisId::kYaw, {});
  CHECK_FALSE(a.ok);
  CHECK_FALSE(a.error.empty());
  FitReport b = fit_friction(AxisId::kPitch, {{0.1, 0.2}}, NonlinearTermParams::identified());
  CHECK_FALSE(b.ok);
  CHECK_FALSE(b.error.empty());
}

TEST_CASE("closed-loop yaw identification, noise-free") {
  IdentificationOptions o = IdentificationOptions::for_axis(AxisId::kYaw);
  IdentificationDataset st, sw;
  FitReport r = identify(o, &st, &sw);
  REQUIRE(r.ok);
  CHECK(st.statics.size() == 25);
  CHECK(sw.sweeps.size() == 15 * 2 * 10);  // speeds x directions x runs
  CHECK(st.clamp_events == st.startup_clamps);
  auto errs = coefficient_errors(AxisId::kYaw, r.params, o.truth);
  CHECK(error_of(errs, "a_c") < 0.01);
  CHECK(error_of(errs, "b_c") < 0.01);
  for (const auto& [name, err] : errs) {
    INFO(name);
    CHECK(err < 0.01);
  }
}

TEST_CASE("closed-loop pitch gravity identification under noise") {
  IdentificationOptions o = IdentificationOptions::for_axis(AxisId::kPitch);
  o.noise_sigma = 0.01;
  IdentificationDataset st;
  FitReport r = fit_static(AxisId::kPitch, run_static_test(o).statics);
  REQUIRE(r.ok);
  auto errs = coefficient_errors(AxisId::kPitch, r.params, o.truth);
  for (const char* k : {"a_g", "b_g", "c_g"}) {
    INFO(k);
    CHECK(error_of(errs, k) < 0.05);
  }
}

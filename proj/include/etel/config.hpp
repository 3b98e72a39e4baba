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
#include <cstdint>
#include <string>

#include "etel/controller.hpp"
#include "etel/node.hpp"
#include "etel/plant.hpp"
#include "etel/transport.hpp"

namespace etel {

enum class Scenario { kFreeMotion, kContactHard, kContactSoft, kShadowQuantization, kIdentification, kTiming };
const char* scenario_name(Scenario s);
Scenario parse_scenario(const std::string& s);

enum class TransportKind { kInproc, kUdp };

struct ScenarioConfig {
  Scenario scenario = Scenario::kFreeMotion;
  double duration = 20.0;  // s
  double t_s = 0.02;       // s
  ControlMode mode = ControlMode::kPlain;
  int substeps = 10;

  // crypto
  unsigned lambda = 128;
  double gamma_c = 1e16;
  double gamma_p = 1e16;
  std::uint64_t seed = 1;
  std::string key_file;  // load instead of generating when set

  // link
  TransportKind transport = TransportKind::kInproc;
  ChannelConfig channel;
  std::string udp_host = "127.0.0.1";
  std::uint16_t leader_port = 0;  // 0: ephemeral
  std::uint16_t follower_port = 0;
  bool udp_pace = true;  // release steps on the wall clock
  std::string capture_path;
  std::size_t stale_alarm_threshold = 5;

  // plant and controller
  std::array<ControllerGains, kAxisCount> gains{ControllerGains::yaw(), ControllerGains::pitch()};
  std::array<MotorParams, kAxisCount> motors{};
  NonlinearTermParams model = NonlinearTermParams::identified();
  NonlinearTermParams truth = NonlinearTermParams::identified();
  OperatorModel hand;
  EnvironmentModel environment;
  std::array<double, kAxisCount> initial{};  // rad, both arms

  // metrics and checks
  double steady_after = 2.0;  // s, start of the steady window
  std::array<double, kAxisCount> tracking_bound_deg{1.0, 2.0};
  double force_ratio_max = 0.05;
  double penetration_max_deg = 5.0;
  double delta_max = 1e-12;  // A
  double noise_sigma = 0.0;  // identification, Nm
  std::string csv_path;
  std::string timing_csv_path;
  std::string json_path;

  void validate() const;
};

// Defaults for a scenario (trajectories, environment, durations).
ScenarioConfig default_config(Scenario s);

// Applies one "key = value" setting; throws ConfigError on an unknown key
// or a malformed value. `scenario` resets everything to that scenario's
// defaults, so it should come first.
void apply_setting(ScenarioConfig& cfg, const std::string& key, const std::string& value);

// Reads a key-value file ('#' starts a comment) on top of `cfg`.
void load_config_file(const std::string& path, ScenarioConfig& cfg);

// "t:deg, t:deg, ..." -> trajectory in radians.
Trajectory parse_trajectory(const std::string& s);

NodeSetup node_setup(const ScenarioConfig& cfg, Role role);

}  // namespace etel

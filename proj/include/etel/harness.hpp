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
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "etel/config.hpp"
#include "etel/elgamal.hpp"
#include "etel/identification.hpp"
#include "etel/node.hpp"

namespace etel {

// Both nodes' records for one control period.
struct StepRow {
  NodeStepRecord leader;
  NodeStepRecord follower;
};

struct WallStats {
  std::size_t samples = 0;
  double mean = 0.0;  // s
  double p99 = 0.0;
  double max = 0.0;
  std::size_t deadline_misses = 0;
};
WallStats wall_stats(const std::vector<double>& walls, double deadline);

struct AxisSummary {
  double max_err_deg = 0.0;          // |theta_l - theta_f|, whole run
  double mean_err_deg = 0.0;
  double steady_max_err_deg = 0.0;   // t >= steady_after
  double steady_force_sum_max = 0.0; // |tau_e_l + tau_e_f|, Nm
  double contact_torque = 0.0;       // mean |object torque| in the steady window, Nm
  double force_ratio = 0.0;          // steady_force_sum_max / contact_torque
  double penetration_deg = 0.0;      // mean follower penetration in the steady window
  double max_delta = 0.0;            // shadow mode, A
  double max_delta_bound = 0.0;
  std::size_t clamps_leader = 0;
  std::size_t clamps_follower = 0;
};

struct IdentificationSummary {
  std::array<FitReport, kAxisCount> fits;
  std::array<std::vector<std::pair<std::string, double>>, kAxisCount> errors;
  std::array<std::size_t, kAxisCount> clamp_events{};
};

struct RunReport {
  ScenarioConfig config;
  std::vector<StepRow> rows;
  std::array<AxisSummary, kAxisCount> axes{};
  bool finite = true;
  WallStats wall_leader, wall_follower;
  std::optional<WallStats> plain_wall;  // timing scenario: plain companion run
  std::size_t alarms = 0;
  std::size_t stale_alarms = 0;
  unsigned long max_signal_slack = 0;
  std::uint64_t messages_sent = 0, messages_dropped = 0;
  std::optional<IdentificationSummary> identification;
  double elapsed = 0.0;  // s, whole run
};

// Session keys for a configuration: read from crypto.key_file, or generated
// from the seed.
KeyPair session_keys(const ScenarioConfig& cfg);

// Runs a scenario end to end and fills in the summary. Writes the CSV / JSON
// outputs when the config names them. Config errors throw before any step.
RunReport run_scenario(const ScenarioConfig& cfg);

// Lower-level runners (no summary, no files). `keys` may be null for plain.
std::vector<StepRow> run_inproc(const ScenarioConfig& cfg, const KeyPair* keys, RunReport* report = nullptr);
std::vector<StepRow> run_udp(const ScenarioConfig& cfg, const KeyPair& keys, RunReport* report = nullptr);

void summarize(RunReport& r);

// Metrics CSV: deterministic columns only, so identical configs and seeds
// give byte-identical files. Wall-clock times go to the timing CSV.
inline constexpr const char* kCsvSchema = "etel-metrics-1";
void write_csv(const RunReport& r, std::ostream& out);
void write_timing_csv(const RunReport& r, std::ostream& out);
std::string summary_json(const RunReport& r);

struct CheckResult {
  std::string name;
  bool pass;
  std::string detail;
};
// Acceptance thresholds applicable to the report's scenario.
std::vector<CheckResult> check_report(const RunReport& r);

}  // namespace etel

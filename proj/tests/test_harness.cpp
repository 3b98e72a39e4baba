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
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "etel/errors.hpp"
#include "etel/harness.hpp"

using namespace etel;

namespace {

std::string temp_path(const char* name) { return (std::filesystem::temp_directory_path() / name).string(); }

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

const CheckResult* find_check(const std::vector<CheckResult>& cs, const std::string& name) {
  for (const auto& c : cs)
    if (c.name == name) return &c;
  return nullptr;
}

}  // namespace

TEST_CASE("scenario defaults") {
  ScenarioConfig fm = default_config(Scenario::kFreeMotion);
  CHECK(fm.t_s == 0.02);
  CHECK(fm.lambda == 128);
  CHECK(fm.gamma_c == 1e16);
  CHECK(fm.gains[0].k_p == 300.0);
  CHECK(fm.gains[1].k_p == 120.0);
  CHECK_NOTHROW(fm.validate());
  CHECK(default_config(Scenario::kShadowQuantization).mode == ControlMode::kShadow);
  CHECK(default_config(Scenario::kContactSoft).environment.stiffness <
        default_config(Scenario::kContactHard).environment.stiffness);
  for (const char* s : {"free_motion", "contact_hard", "contact_soft", "shadow_quantization", "identification", "timing"})
    CHECK(std::string(scenario_name(parse_scenario(s))) == s);
  CHECK_THROWS_AS(parse_scenario("dance"), ConfigError);
}

TEST_CASE("settings and validation") {
  ScenarioConfig c = default_config(Scenario::kFreeMotion);
  apply_setting(c, "gains.yaw.k_p", "250");
  apply_setting(c, "crypto.gamma", "1e12");
  apply_setting(c, "channel.loss_probability", "0.25");
  apply_setting(c, "operator.pitch.trajectory", "0:30, 1:40");
  CHECK(c.gains[0].k_p == 250.0);
  CHECK(c.gamma_c == 1e12);
  CHECK(c.gamma_p == 1e12);
  CHECK(c.channel.loss_probability == 0.25);
  CHECK(c.hand.reference[1](1.0) == doctest::Approx(deg2rad(40.0)));
  CHECK_THROWS_AS(apply_setting(c, "gains.roll.k_p", "1"), ConfigError);
  CHECK_THROWS_AS(apply_setting(c, "no.such.key", "1"), ConfigError);
  CHECK_THROWS_AS(apply_setting(c, "duration", "ten"), ConfigError);

  ScenarioConfig u = default_config(Scenario::kFreeMotion);
  u.transport = TransportKind::kUdp;
  CHECK_THROWS_AS(u.validate(), ConfigError);  // plain over UDP
  u.mode = ControlMode::kEncrypted;
  CHECK_NOTHROW(u.validate());
  ScenarioConfig s = default_config(Scenario::kShadowQuantization);
  s.mode = ControlMode::kPlain;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  ScenarioConfig d = default_config(Scenario::kFreeMotion);
  d.steady_after = d.duration;
  CHECK_THROWS_AS(d.validate(), ConfigError);
}

TEST_CASE("config file with comments; errors carry the line") {
  const std::string path = temp_path("etel_test.cfg");
  {
    std::ofstream f(path);
    f << "# demo\nscenario = contact_soft\n\nduration = 3   # short\nsteady_after = 2\nmode = encrypted\n";
  }
  ScenarioConfig c = default_config(Scenario::kFreeMotion);
  load_config_file(path, c);
  CHECK(c.scenario == Scenario::kContactSoft);
  CHECK(c.duration == 3.0);
  CHECK(c.mode == ControlMode::kEncrypted);
  {
    std::ofstream f(path);
    f << "duration = 3\nbogus\n";
  }
  try {
    load_config_file(path, c);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find(":2:") != std::string::npos);
  }
  std::remove(path.c_str());
}

TEST_CASE("trajectory strings") {
  Trajectory t = parse_trajectory("0:0, 2:90");
  CHECK(t(2.0) == doctest::Approx(kPi / 2));
  CHECK_THROWS_AS(parse_trajectory("0-0"), ConfigError);
}

TEST_CASE("wall statistics") {
  WallStats w = wall_stats({0.001, 0.002, 0.003, 0.030}, 0.02);
  CHECK(w.samples == 4);
  CHECK(w.mean == doctest::Approx(0.009));
  CHECK(w.max == 0.030);
  CHECK(w.deadline_misses == 1);
  CHECK(wall_stats({}, 0.02).samples == 0);
}

TEST_CASE("free motion smoke run, plain: report, CSV schema, reproducibility") {
  ScenarioConfig c = default_config(Scenario::kFreeMotion);
  c.duration = 4.0;
  RunReport a = run_scenario(c), b = run_scenario(c);
  CHECK(a.rows.size() == 200);
  CHECK(a.finite);
  CHECK(std::isfinite(a.axes[0].max_err_deg));
  std::ostringstream ca, cb;
  write_csv(a, ca);
  write_csv(b, cb);
  CHECK(ca.str() == cb.str());

  std::istringstream in(ca.str());
  std::string header, first;
  std::getline(in, header);
  std::getline(in, first);
  auto cols = split(header);
  CHECK(cols.size() == 2 + 2 * 20 + 4);
  CHECK(cols[0] == "seq");
  CHECK(cols[2] == "yaw_theta_l_deg");
  CHECK(cols.back() == "alarm_f");
  CHECK(split(first).size() == cols.size());

  std::ostringstream timing;
  write_timing_csv(a, timing);
  CHECK(timing.str().rfind("seq,wall_l,wall_f\n", 0) == 0);

  auto js = summary_json(a);
  CHECK(js.find("\"schema\"") != std::string::npos);
  CHECK(js.find(kCsvSchema) != std::string::npos);
}

TEST_CASE("yaw tracks the operator within the bound") {
  RunReport r = run_scenario(default_config(Scenario::kFreeMotion));
  CHECK(r.axes[0].steady_max_err_deg <= 1.0);
  const CheckResult* c = find_check(check_report(r), "yaw.tracking");
  REQUIRE(c != nullptr);
  CHECK(c->pass);
}

TEST_CASE("contact: small force sum, sponge sinks further than aluminium") {
  RunReport hard = run_scenario(default_config(Scenario::kContactHard));
  RunReport soft = run_scenario(default_config(Scenario::kContactSoft));
  for (const RunReport* r : {&hard, &soft}) {
    CHECK(r->axes[0].contact_torque > 0.1);
    CHECK(r->axes[0].force_ratio < 0.05);
  }
  CHECK(soft.axes[0].penetration_deg > hard.axes[0].penetration_deg);
  CHECK(soft.axes[0].penetration_deg <= 5.0);
}

TEST_CASE("shadow: zero inputs give only the zero-encoding quantum") {
  RandomSource rng(21);
  KeyPair kp = gen(128, rng);
  const ControllerMatrices m = assemble_phi(ControllerGains::yaw(), MotorParams::yaw());
  EncryptedAxisController enc(m, kp, 1e16, 1e16, rng);
  PlainAxisController plain(m);
  double quantum = 0.0;
  for (int j = 0; j < kXiSize; ++j) quantum += std::abs(m.phi(kPsiCurrent, j)) / 1e16;
  for (int k = 0; k < 5; ++k) {
    AxisSignals zero{};
    double bound = 0.0;
    ControllerOutput e = enc.shadow_step(zero, plain.tau_e_self_prev(), nullptr, &bound);
    ControllerOutput p = plain.step(zero);
    CHECK(p.current == 0.0);
    // encode(0) = 1 stands for 1/gamma_p in every slot
    CHECK(std::abs(e.current - p.current) <= 1.01 * quantum * (k + 1));
  }
}

TEST_CASE("shadow run: delta well below the D/A quantum") {
  ScenarioConfig c = default_config(Scenario::kShadowQuantization);
  c.duration = 1.0;
  c.steady_after = 0.5;
  RunReport r = run_scenario(c);
  for (AxisId a : kAxes) {
    CHECK(r.axes[index(a)].max_delta > 0.0);
    CHECK(r.axes[index(a)].max_delta <= 1e-12);
  }
  for (const auto& ch : check_report(r)) {
    INFO(ch.name, ": ", ch.detail);
    CHECK(ch.pass);
  }
}

TEST_CASE("a silent link raises staleness alarms and holds remote values") {
  ScenarioConfig c = default_config(Scenario::kFreeMotion);
  c.duration = 1.0;
  c.steady_after = 0.5;
  c.channel.loss_probability = 1.0;
  RunReport r = run_scenario(c);
  CHECK(r.messages_dropped == r.messages_sent);
  CHECK(r.stale_alarms > 0);
  for (const auto& row : r.rows) CHECK_FALSE(row.leader.fresh_remote);
}

TEST_CASE("one-step link delay: nodes consume the previous period's message") {
  ScenarioConfig c = default_config(Scenario::kFreeMotion);
  c.duration = 1.0;
  c.steady_after = 0.5;
  c.channel.fixed_delay = c.t_s;
  RunReport r = run_scenario(c);
  CHECK_FALSE(r.rows[0].leader.fresh_remote);
  for (std::size_t k = 1; k < r.rows.size(); ++k) CHECK(r.rows[k].leader.fresh_remote);
  CHECK(r.stale_alarms == 0);
}

TEST_CASE("unpaced UDP loopback reproduces the inproc run step for step") {
  ScenarioConfig c = default_config(Scenario::kFreeMotion);
  c.mode = ControlMode::kEncrypted;
  c.duration = 1.0;
  c.steady_after = 0.5;
  c.lambda = 64;
  const KeyPair kp = session_keys(c);
  c.transport = TransportKind::kUdp;
  c.udp_pace = false;
  const auto udp = run_udp(c, kp);
  c.transport = TransportKind::kInproc;
  const auto inproc = run_inproc(c, &kp);
  REQUIRE(udp.size() == inproc.size());
  for (std::size_t k = 0; k < udp.size(); ++k)
    for (std::size_t i = 0; i < kAxisCount; ++i) {
      CHECK(udp[k].leader.axes[i].theta == inproc[k].leader.axes[i].theta);
      CHECK(udp[k].follower.axes[i].current == inproc[k].follower.axes[i].current);
    }
}

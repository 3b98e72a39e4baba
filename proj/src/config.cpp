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

#include "etel/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "etel/errors.hpp"

namespace etel {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const char* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end || !std::isfinite(out))
    throw ConfigError("config: '" + key + "' expects a number, got '" + v + "'");
  return out;
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const char* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end)
    throw ConfigError("config: '" + key + "' expects an unsigned integer, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config: '" + key + "' expects a boolean, got '" + v + "'");
}

AxisId to_axis(const std::string& key, const std::string& v) {
  if (v == "yaw") return AxisId::kYaw;
  if (v == "pitch") return AxisId::kPitch;
  throw ConfigError("config: '" + key + "' expects yaw | pitch, got '" + v + "'");
}

using Setter = std::function<void(ScenarioConfig&, const std::string& key, const std::string& v)>;

template <class F>
Setter number(F f) {
  return [f](ScenarioConfig& c, const std::string& k, const std::string& v) { f(c, to_double(k, v)); };
}

void add_coefficients(std::map<std::string, Setter>& m, const std::string& prefix,
                      NonlinearTermParams ScenarioConfig::*which) {
  auto yaw = [&](const char* name, double YawTerms::*field) {
    m[prefix + ".yaw." + name] = number([which, field](ScenarioConfig& c, double x) { (c.*which).yaw.*field = x; });
  };
  auto pitch = [&](const char* name, double PitchTerms::*field) {
    m[prefix + ".pitch." + name] =
        number([which, field](ScenarioConfig& c, double x) { (c.*which).pitch.*field = x; });
  };
  yaw("a_c", &YawTerms::a_c);
  yaw("b_c", &YawTerms::b_c);
  yaw("a_f1", &YawTerms::a_f1);
  yaw("b_f1", &YawTerms::b_f1);
  yaw("c_f1", &YawTerms::c_f1);
  yaw("d_f1", &YawTerms::d_f1);
  pitch("a_g", &PitchTerms::a_g);
  pitch("b_g", &PitchTerms::b_g);
  pitch("c_g", &PitchTerms::c_g);
  pitch("a_f2", &PitchTerms::a_f2);
  pitch("b_f2", &PitchTerms::b_f2);
  pitch("c_f2", &PitchTerms::c_f2);
  pitch("d_f2", &PitchTerms::d_f2);
  pitch("e_f2", &PitchTerms::e_f2);
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> m;
    m["duration"] = number([](ScenarioConfig& c, double x) { c.duration = x; });
    m["t_s"] = number([](ScenarioConfig& c, double x) {
      c.t_s = x;
      for (auto& g : c.gains) g.t_s = x;
    });
    m["mode"] = [](ScenarioConfig& c, const std::string&, const std::string& v) { c.mode = parse_mode(v); };
    m["substeps"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) {
      c.substeps = static_cast<int>(to_uint(k, v));
    };
    m["crypto.lambda"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) {
      c.lambda = static_cast<unsigned>(to_uint(k, v));
    };
    m["crypto.gamma_c"] = number([](ScenarioConfig& c, double x) { c.gamma_c = x; });
    m["crypto.gamma_p"] = number([](ScenarioConfig& c, double x) { c.gamma_p = x; });
    m["crypto.gamma"] = number([](ScenarioConfig& c, double x) { c.gamma_c = c.gamma_p = x; });
    m["crypto.seed"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.seed = to_uint(k, v); };
    m["crypto.key_file"] = [](ScenarioConfig& c, const std::string&, const std::string& v) { c.key_file = v; };
    m["transport"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) {
      if (v == "inproc") {
        c.transport = TransportKind::kInproc;
      } else if (v == "udp") {
        c.transport = TransportKind::kUdp;
      } else {
        throw ConfigError("config: '" + k + "' expects inproc | udp, got '" + v + "'");
      }
    };
    m["channel.fixed_delay"] = number([](ScenarioConfig& c, double x) { c.channel.fixed_delay = x; });
    m["channel.jitter"] = number([](ScenarioConfig& c, double x) { c.channel.jitter = x; });
    m["channel.loss_probability"] = number([](ScenarioConfig& c, double x) { c.channel.loss_probability = x; });
    m["channel.reorder"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) {
      c.channel.reorder = to_bool(k, v);
    };
    m["udp.host"] = [](ScenarioConfig& c, const std::string&, const std::string& v) { c.udp_host = v; };
    m["udp.leader_port"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) {
      const auto p = to_uint(k, v);
      if (p > 65535) throw ConfigError("config: '" + k + "' out of range");
      c.leader_port = static_cast<std::uint16_t>(p);
    };
    m["udp.follower_port"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) {
      const auto p = to_uint(k, v);
      if (p > 65535) throw ConfigError("config: '" + k + "' out of range");
      c.follower_port = static_cast<std::uint16_t>(p);
    };
    m["udp.pace"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) { c.udp_pace = to_bool(k, v); };
    m["udp.capture"] = [](ScenarioConfig& c, const std::string&, const std::string& v) { c.capture_path = v; };
    m["link.stale_alarm_threshold"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) {
      c.stale_alarm_threshold = to_uint(k, v);
    };

    for (AxisId a : kAxes) {
      const std::size_t i = index(a);
      const std::string ax = axis_name(a);
      m["gains." + ax + ".k_p"] = number([i](ScenarioConfig& c, double x) { c.gains[i].k_p = x; });
      m["gains." + ax + ".k_d"] = number([i](ScenarioConfig& c, double x) { c.gains[i].k_d = x; });
      m["gains." + ax + ".k_f"] = number([i](ScenarioConfig& c, double x) { c.gains[i].k_f = x; });
      m["gains." + ax + ".g_p"] = number([i](ScenarioConfig& c, double x) { c.gains[i].g_p = x; });
      m["gains." + ax + ".g_d"] = number([i](ScenarioConfig& c, double x) { c.gains[i].g_d = x; });
      m["gains." + ax + ".g_r"] = number([i](ScenarioConfig& c, double x) { c.gains[i].g_r = x; });
      m["motor." + ax + ".j_bar"] = number([i](ScenarioConfig& c, double x) { c.motors[i].j_bar = x; });
      m["motor." + ax + ".k_t"] = number([i](ScenarioConfig& c, double x) { c.motors[i].k_t = x; });
      m["motor." + ax + ".j_true"] = number([i](ScenarioConfig& c, double x) { c.motors[i].j_true = x; });
      m["motor." + ax + ".k_true"] = number([i](ScenarioConfig& c, double x) { c.motors[i].k_true = x; });
      m["operator." + ax + ".k_h"] = number([i](ScenarioConfig& c, double x) { c.hand.k_h[i] = x; });
      m["operator." + ax + ".b_h"] = number([i](ScenarioConfig& c, double x) { c.hand.b_h[i] = x; });
      m["operator." + ax + ".trajectory"] = [i](ScenarioConfig& c, const std::string&, const std::string& v) {
        c.hand.reference[i] = parse_trajectory(v);
      };
      m["initial." + ax + "_deg"] = number([i](ScenarioConfig& c, double x) { c.initial[i] = deg2rad(x); });
      m["check." + ax + "_bound_deg"] = number([i](ScenarioConfig& c, double x) { c.tracking_bound_deg[i] = x; });
    }
    add_coefficients(m, "model", &ScenarioConfig::model);
    add_coefficients(m, "truth", &ScenarioConfig::truth);

    m["environment.enabled"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) {
      c.environment.enabled = to_bool(k, v);
    };
    m["environment.axis"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) {
      c.environment.axis = to_axis(k, v);
    };
    m["environment.contact_angle_deg"] =
        number([](ScenarioConfig& c, double x) { c.environment.contact_angle = deg2rad(x); });
    m["environment.stiffness"] = number([](ScenarioConfig& c, double x) { c.environment.stiffness = x; });
    m["environment.damping"] = number([](ScenarioConfig& c, double x) { c.environment.damping = x; });

    m["steady_after"] = number([](ScenarioConfig& c, double x) { c.steady_after = x; });
    m["check.force_ratio"] = number([](ScenarioConfig& c, double x) { c.force_ratio_max = x; });
    m["check.penetration_deg"] = number([](ScenarioConfig& c, double x) { c.penetration_max_deg = x; });
    m["check.delta_max"] = number([](ScenarioConfig& c, double x) { c.delta_max = x; });
    m["identification.noise_sigma"] = number([](ScenarioConfig& c, double x) { c.noise_sigma = x; });
    m["output.csv"] = [](ScenarioConfig& c, const std::string&, const std::string& v) { c.csv_path = v; };
    m["output.timing_csv"] = [](ScenarioConfig& c, const std::string&, const std::string& v) {
      c.timing_csv_path = v;
    };
    m["output.json"] = [](ScenarioConfig& c, const std::string&, const std::string& v) { c.json_path = v; };
    return m;
  }();
  return table;
}

Trajectory sweep(std::initializer_list<std::pair<double, double>> knots_deg) {
  std::vector<Trajectory::Knot> k;
  for (auto [t, d] : knots_deg) k.push_back({t, deg2rad(d)});
  return Trajectory(std::move(k));
}

}  // namespace

const char* scenario_name(Scenario s) {
  switch (s) {
    case Scenario::kFreeMotion:
      return "free_motion";
    case Scenario::kContactHard:
      return "contact_hard";
    case Scenario::kContactSoft:
      return "contact_soft";
    case Scenario::kShadowQuantization:
      return "shadow_quantization";
    case Scenario::kIdentification:
      return "identification";
    case Scenario::kTiming:
      return "timing";
  }
  return "?";
}

Scenario parse_scenario(const std::string& s) {
  for (Scenario x : {Scenario::kFreeMotion, Scenario::kContactHard, Scenario::kContactSoft,
                     Scenario::kShadowQuantization, Scenario::kIdentification, Scenario::kTiming})
    if (s == scenario_name(x)) return x;
  throw ConfigError("unknown scenario '" + s + "'");
}

void ScenarioConfig::validate() const {
  if (!(duration > 0)) throw ConfigError("config: duration must be positive");
  if (!(t_s > 0)) throw ConfigError("config: t_s must be positive");
  if (substeps < 1) throw ConfigError("config: substeps must be >= 1");
  if (lambda < 16) throw ConfigError("config: crypto.lambda must be >= 16");
  if (!(gamma_c >= 1) || !(gamma_p >= 1)) throw ConfigError("config: gammas must be >= 1");
  for (const auto& g : gains) {
    g.validate();
    if (g.t_s != t_s) throw ConfigError("config: controller T_s differs from t_s");
  }
  for (const auto& m : motors) m.validate();
  channel.validate();
  for (AxisId a : kAxes) {
    const std::size_t i = index(a);
    if (hand.k_h[i] < 0 || hand.b_h[i] < 0) throw ConfigError("config: operator gains must be >= 0");
  }
  if (environment.stiffness < 0 || environment.damping < 0)
    throw ConfigError("config: environment stiffness and damping must be >= 0");
  if (!(steady_after >= 0 && steady_after < duration))
    throw ConfigError("config: steady_after must lie inside [0, duration)");
  if (transport == TransportKind::kUdp && mode != ControlMode::kEncrypted)
    throw ConfigError("config: the udp transport carries ciphertexts only (mode = encrypted)");
  if (scenario == Scenario::kShadowQuantization && mode != ControlMode::kShadow)
    throw ConfigError("config: shadow_quantization needs mode = shadow");
}

ScenarioConfig default_config(Scenario s) {
  ScenarioConfig c;
  c.scenario = s;
  // Simulated arms are heavier than the controller's nominal model.
  c.motors[0] = {1.37e-4, 0.5, 6.85e-4, 0.5};
  c.motors[1] = {4.1e-5, 0.5106, 1.37e-4, 0.5106};
  c.hand.k_h = {1.0, 1.0};
  c.hand.b_h = {0.05, 0.05};
  c.initial = {0.0, deg2rad(45.0)};
  c.hand.reference[0] = sweep({{0, 0}, {2.5, 60}, {7.5, -60}, {12.5, 60}, {17.5, -60}, {20, 0}});
  c.hand.reference[1] = sweep({{0, 45}, {2.5, 70}, {7.5, 20}, {12.5, 70}, {17.5, 20}, {20, 45}});
  switch (s) {
    case Scenario::kFreeMotion:
    case Scenario::kIdentification:
      break;
    case Scenario::kShadowQuantization:
      c.mode = ControlMode::kShadow;
      break;
    case Scenario::kTiming:
      c.mode = ControlMode::kEncrypted;
      c.duration = 5.0;
      break;
    case Scenario::kContactHard:
    case Scenario::kContactSoft:
      c.duration = 12.0;
      c.steady_after = 9.0;
      c.hand.reference[0] = sweep({{0, 0}, {1, 0}, {4, 40}});
      c.hand.reference[1] = Trajectory::constant(deg2rad(45.0));
      c.environment = s == Scenario::kContactHard ? EnvironmentModel::aluminum(deg2rad(10.0))
                                                  : EnvironmentModel::sponge(deg2rad(10.0));
      break;
  }
  return c;
}

void apply_setting(ScenarioConfig& cfg, const std::string& key, const std::string& value) {
  const std::string k = trim(key), v = trim(value);
  if (k == "scenario") {
    cfg = default_config(parse_scenario(v));
    return;
  }
  const auto& t = setters();
  auto it = t.find(k);
  if (it == t.end()) throw ConfigError("config: unknown key '" + k + "'");
  it->second(cfg, k, v);
}

void load_config_file(const std::string& path, ScenarioConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
    try {
      apply_setting(cfg, line.substr(0, eq), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

Trajectory parse_trajectory(const std::string& s) {
  std::vector<Trajectory::Knot> knots;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ConfigError("trajectory: expected 't:deg', got '" + item + "'");
    knots.push_back({to_double("trajectory", trim(item.substr(0, colon))),
                     deg2rad(to_double("trajectory", trim(item.substr(colon + 1))))});
  }
  return Trajectory(std::move(knots));
}

NodeSetup node_setup(const ScenarioConfig& cfg, Role role) {
  NodeSetup n;
  n.role = role;
  n.mode = cfg.mode;
  n.gains = cfg.gains;
  n.motors = cfg.motors;
  n.model = cfg.model;
  n.truth = cfg.truth;
  n.initial[AxisId::kYaw].theta = cfg.initial[0];
  n.initial[AxisId::kPitch].theta = cfg.initial[1];
  n.substeps = cfg.substeps;
  n.hand = cfg.hand;
  n.environment = cfg.environment;
  n.gamma_c = cfg.gamma_c;
  n.gamma_p = cfg.gamma_p;
  n.session_id = cfg.seed * 0x9e3779b97f4a7c15ULL + 1;
  n.stale_alarm_threshold = cfg.stale_alarm_threshold;
  return n;
}

}  // namespace etel

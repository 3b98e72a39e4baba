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

// etel: command-line front end.
//   etel run [flags] [--config FILE] [--check]
//   etel keys gen --out FILE [--lambda N] [--seed N] [--public-only]
//   etel audit phi [--axis yaw|pitch] [--config FILE]
//   etel protocol dump --capture FILE --key FILE

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include "etel/config.hpp"
#include "etel/controller.hpp"
#include "etel/elgamal.hpp"
#include "etel/errors.hpp"
#include "etel/harness.hpp"
#include "etel/transport.hpp"
#include "etel/wire.hpp"

using namespace etel;

namespace {

struct RunFlags {
  std::string scenario = "free_motion";
  std::string config;
  std::string mode;
  std::string transport;
  double duration = 0;
  double t_s = 0;
  unsigned lambda = 0;
  double gamma_c = 0, gamma_p = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string key_file, csv, timing_csv, json;
  std::vector<std::string> sets;
  bool check = false;
};

ScenarioConfig build_config(const RunFlags& f) {
  ScenarioConfig cfg = default_config(parse_scenario(f.scenario));
  if (!f.mode.empty()) apply_setting(cfg, "mode", f.mode);
  if (!f.transport.empty()) apply_setting(cfg, "transport", f.transport);
  if (f.duration > 0) cfg.duration = f.duration;
  if (f.t_s > 0) apply_setting(cfg, "t_s", std::to_string(f.t_s));
  if (f.lambda) cfg.lambda = f.lambda;
  if (f.gamma_c > 0) cfg.gamma_c = f.gamma_c;
  if (f.gamma_p > 0) cfg.gamma_p = f.gamma_p;
  if (f.seed_set) cfg.seed = f.seed;
  if (!f.key_file.empty()) cfg.key_file = f.key_file;
  if (!f.csv.empty()) cfg.csv_path = f.csv;
  if (!f.timing_csv.empty()) cfg.timing_csv_path = f.timing_csv;
  if (!f.json.empty()) cfg.json_path = f.json;
  for (const auto& kv : f.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  // The file has the last word.
  if (!f.config.empty()) load_config_file(f.config, cfg);
  return cfg;
}

int cmd_run(const RunFlags& f) {
  ScenarioConfig cfg = build_config(f);
  RunReport r = run_scenario(cfg);
  std::cout << summary_json(r) << "\n";
  if (!f.check) return 0;
  int failed = 0;
  for (const auto& c : check_report(r)) {
    std::fprintf(stderr, "%s %s: %s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
    failed += !c.pass;
  }
  return failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Encrypted four-channel bilateral teleoperation: simulation and experiment harness"};
  app.require_subcommand(1);

  RunFlags rf;
  auto* run = app.add_subcommand("run", "Run a scenario and print the JSON summary");
  run->add_option("--scenario", rf.scenario,
                  "free_motion | contact_hard | contact_soft | shadow_quantization | identification | timing");
  run->add_option("--config", rf.config, "Key-value config file (overrides flags)");
  run->add_option("--mode", rf.mode, "plain | encrypted | shadow");
  run->add_option("--transport", rf.transport, "inproc | udp");
  run->add_option("--duration", rf.duration, "Seconds");
  run->add_option("--t-s", rf.t_s, "Sampling period, s");
  run->add_option("--lambda", rf.lambda, "Modulus bit length");
  run->add_option("--gamma-c", rf.gamma_c, "Controller scale factor");
  run->add_option("--gamma-p", rf.gamma_p, "Signal scale factor");
  run->add_option("--seed", rf.seed, "Seed for keys, nonces and channel")->each([&](const std::string&) {
    rf.seed_set = true;
  });
  run->add_option("--key-file", rf.key_file, "Session key file");
  run->add_option("--csv", rf.csv, "Per-step metrics CSV");
  run->add_option("--timing-csv", rf.timing_csv, "Per-step controller wall times");
  run->add_option("--json", rf.json, "Summary JSON file");
  run->add_option("--set", rf.sets, "Any config key: --set gains.yaw.k_p=250")->take_all();
  run->add_flag("--check", rf.check, "Exit 1 if an acceptance threshold is violated");

  auto* keys = app.add_subcommand("keys", "Key management");
  keys->require_subcommand(1);
  auto* keygen = keys->add_subcommand("gen", "Generate a session key file");
  std::string key_out;
  unsigned key_lambda = 128;
  std::uint64_t key_seed = 1;
  bool public_only = false;
  keygen->add_option("--out", key_out, "Output file")->required();
  keygen->add_option("--lambda", key_lambda, "Modulus bit length");
  keygen->add_option("--seed", key_seed, "Generator seed");
  keygen->add_flag("--public-only", public_only, "Omit the secret exponent");

  auto* audit = app.add_subcommand("audit", "Inspect controller parameters");
  audit->require_subcommand(1);
  auto* phi = audit->add_subcommand("phi", "Print the 7x11 controller matrix");
  std::string phi_axis = "yaw";
  std::string phi_config;
  phi->add_option("--axis", phi_axis, "yaw | pitch");
  phi->add_option("--config", phi_config, "Config file for gains and motor parameters");

  auto* protocol = app.add_subcommand("protocol", "Wire format tools");
  protocol->require_subcommand(1);
  auto* dump = protocol->add_subcommand("dump", "Decode the headers of a capture file");
  std::string cap_path, cap_key;
  dump->add_option("--capture", cap_path, "Capture file")->required();
  dump->add_option("--key", cap_key, "Key file (public part suffices)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(rf);
    if (*keygen) {
      RandomSource rng(key_seed);
      KeyPair kp = gen(key_lambda, rng);
      write_key_file(key_out, kp.pk, public_only ? nullptr : &kp.sk);
      std::printf("wrote %s (%u-bit modulus)\n", key_out.c_str(), static_cast<unsigned>(kp.pk.params.bits()));
      return 0;
    }
    if (*phi) {
      ScenarioConfig cfg = default_config(Scenario::kFreeMotion);
      if (!phi_config.empty()) load_config_file(phi_config, cfg);
      const AxisId a = phi_axis == "pitch" ? AxisId::kPitch : AxisId::kYaw;
      if (phi_axis != "yaw" && phi_axis != "pitch") throw ConfigError("--axis expects yaw | pitch");
      const auto m = assemble_phi(cfg.gains[index(a)], cfg.motors[index(a)]);
      std::printf("# %s axis, rows: e ed q z i tau_d tau_e; columns: e ed q z i th_other th_self w tau_other "
                  "tau_self f\n%s",
                  axis_name(a), format_phi(m).c_str());
      std::printf("# observability rank %d\n", observability_check(cfg.motors[index(a)]));
      return 0;
    }
    if (*dump) {
      KeyFile kf = read_key_file(cap_key);
      std::size_t i = 0;
      for (const auto& d : read_capture(cap_path)) {
        try {
          WireMessage m = deserialize(d, kf.pk.params);
          std::printf("%zu %s seq=%llu session=%016llx axes=%zu bytes=%zu\n", i, role_name(m.role),
                      static_cast<unsigned long long>(m.seq), static_cast<unsigned long long>(m.session_id),
                      m.axes.size(), d.size());
        } catch (const ParseError& e) {
          std::printf("%zu malformed at offset %zu: %s\n", i, e.offset(), e.what());
        }
        ++i;
      }
      return 0;
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "etel: %s\n", e.what());
    return 2;
  }
  return 0;
}

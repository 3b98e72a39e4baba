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

#include "etel/harness.hpp"

#include <algorithm>
#include <barrier>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <ostream>
#include <thread>

#include "etel/errors.hpp"
#include "etel/transport.hpp"

namespace etel {

namespace {

using Clock = std::chrono::steady_clock;

std::size_t step_count(const ScenarioConfig& cfg) {
  return static_cast<std::size_t>(std::llround(cfg.duration / cfg.t_s));
}

void collect_node_stats(RunReport* r, const Node& leader, const Node& follower) {
  if (!r) return;
  r->alarms = leader.alarms() + follower.alarms();
  r->stale_alarms = leader.stale_alarms() + follower.stale_alarms();
  r->max_signal_slack = std::max(leader.max_signal_slack(), follower.max_signal_slack());
  for (AxisId a : kAxes) {
    r->axes[index(a)].clamps_leader = leader.arm().clamp_count(a);
    r->axes[index(a)].clamps_follower = follower.arm().clamp_count(a);
  }
}

bool finite_row(const NodeStepRecord& s) {
  for (const auto& a : s.axes)
    if (!std::isfinite(a.theta) || !std::isfinite(a.current)) return false;
  return true;
}

double percentile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double pos = q * (v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - lo) * (v[hi] - v[lo]);
}

}  // namespace

WallStats wall_stats(const std::vector<double>& walls, double deadline) {
  WallStats w;
  w.samples = walls.size();
  if (walls.empty()) return w;
  double sum = 0.0;
  for (double x : walls) {
    sum += x;
    w.max = std::max(w.max, x);
    if (x >= deadline) ++w.deadline_misses;
  }
  w.mean = sum / walls.size();
  w.p99 = percentile(walls, 0.99);
  return w;
}

KeyPair session_keys(const ScenarioConfig& cfg) {
  if (!cfg.key_file.empty()) {
    KeyFile kf = read_key_file(cfg.key_file);
    if (!kf.sk) throw ConfigError("key file '" + cfg.key_file + "' has no secret exponent; both nodes run Dec+");
    return {kf.pk, *kf.sk};
  }
  RandomSource rng(cfg.seed);
  return gen(cfg.lambda, rng);
}

std::vector<StepRow> run_inproc(const ScenarioConfig& cfg, const KeyPair* keys, RunReport* report) {
  cfg.validate();
  Node leader(node_setup(cfg, Role::kLeader), keys, cfg.seed * 4 + 1);
  Node follower(node_setup(cfg, Role::kFollower), keys, cfg.seed * 4 + 2);
  InprocChannel<NodeMessage> to_follower(cfg.channel, cfg.t_s, cfg.seed * 4 + 3);
  InprocChannel<NodeMessage> to_leader(cfg.channel, cfg.t_s, cfg.seed * 4 + 4);
  Mailbox<NodeMessage> at_leader, at_follower;

  const std::size_t n = step_count(cfg);
  std::vector<StepRow> rows;
  rows.reserve(n);
  for (std::uint64_t k = 0; k < n; ++k) {
    to_follower.send(k, leader.begin_step(k));
    to_leader.send(k, follower.begin_step(k));
    for (auto& m : to_follower.deliver(k)) at_follower.offer(m.seq, std::move(m));
    for (auto& m : to_leader.deliver(k)) at_leader.offer(m.seq, std::move(m));
    auto rl = at_leader.take();
    auto rf = at_follower.take();
    StepRow row;
    row.leader = leader.finish_step(k, rl ? &*rl : nullptr);
    row.follower = follower.finish_step(k, rf ? &*rf : nullptr);
    rows.push_back(std::move(row));
  }
  collect_node_stats(report, leader, follower);
  if (report) {
    report->messages_sent = to_follower.sent() + to_leader.sent();
    report->messages_dropped = to_follower.dropped() + to_leader.dropped();
  }
  return rows;
}

std::vector<StepRow> run_udp(const ScenarioConfig& cfg, const KeyPair& keys, RunReport* report) {
  cfg.validate();
  Node leader(node_setup(cfg, Role::kLeader), &keys, cfg.seed * 4 + 1);
  Node follower(node_setup(cfg, Role::kFollower), &keys, cfg.seed * 4 + 2);
  const std::uint64_t session = leader.setup().session_id;
  UdpTransport tl({cfg.udp_host, cfg.leader_port}, {cfg.udp_host, cfg.follower_port}, keys.pk.params, session,
                  Role::kLeader, cfg.capture_path);
  UdpTransport tf({cfg.udp_host, cfg.follower_port}, {cfg.udp_host, tl.bound_port()}, keys.pk.params, session,
                  Role::kFollower);
  tl.set_peer({cfg.udp_host, tf.bound_port()});

  const std::size_t n = step_count(cfg);
  const auto period = std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(cfg.t_s));
  // Paced: wait at most most of a period for the peer. Unpaced: lockstep
  // with a generous timeout, and both nodes close each step together so a
  // fast peer cannot overwrite seq k with k+1 in the latest-wins mailbox.
  const auto timeout = cfg.udp_pace ? period * 3 / 4 : Clock::duration(std::chrono::seconds(1));
  const auto start = Clock::now() + std::chrono::milliseconds(50);
  std::barrier<> step_end(2);

  auto loop = [&](Node& node, UdpTransport& tr, std::vector<NodeStepRecord>& out) {
    out.reserve(n);
    for (std::uint64_t k = 0; k < n; ++k) {
      if (cfg.udp_pace) std::this_thread::sleep_until(start + period * static_cast<long>(k));
      NodeMessage mine = node.begin_step(k);
      tr.send(*mine.wire);
      std::optional<WireMessage> got = tr.inbox().take_waiting(k, timeout);
      NodeMessage remote;
      if (got) {
        remote.seq = got->seq;
        remote.wire = std::move(got);
      }
      out.push_back(node.finish_step(k, remote.wire ? &remote : nullptr));
      if (!cfg.udp_pace) step_end.arrive_and_wait();
    }
  };
  std::vector<NodeStepRecord> lrec, frec;
  std::exception_ptr lerr, ferr;
  std::thread th_f([&] {
    try {
      loop(follower, tf, frec);
    } catch (...) {
      ferr = std::current_exception();
      step_end.arrive_and_drop();
    }
  });
  try {
    loop(leader, tl, lrec);
  } catch (...) {
    lerr = std::current_exception();
    step_end.arrive_and_drop();
  }
  th_f.join();
  if (lerr) std::rethrow_exception(lerr);
  if (ferr) std::rethrow_exception(ferr);

  // Merge by seq.
  std::vector<StepRow> rows(n);
  for (auto& r : lrec) rows[r.seq].leader = std::move(r);
  for (auto& r : frec) rows[r.seq].follower = std::move(r);
  collect_node_stats(report, leader, follower);
  if (report) {
    report->messages_sent = 2 * n - tl.send_failures() - tf.send_failures();
    report->messages_dropped = 2 * n - tl.received() - tf.received();
  }
  return rows;
}

void summarize(RunReport& r) {
  const ScenarioConfig& c = r.config;
  std::vector<double> wl, wf;
  for (AxisId a : kAxes) {
    const std::size_t i = index(a);
    AxisSummary& s = r.axes[i];
    double sum_err = 0.0, sum_contact = 0.0, sum_pen = 0.0;
    std::size_t n_steady = 0;
    const bool contact_axis = c.environment.enabled && c.environment.axis == a;
    for (const auto& row : r.rows) {
      const AxisRecord& l = row.leader.axes[i];
      const AxisRecord& f = row.follower.axes[i];
      const double err = std::abs(rad2deg(l.theta - f.theta));
      s.max_err_deg = std::max(s.max_err_deg, err);
      sum_err += err;
      for (const AxisRecord* x : {&l, &f}) {
        if (std::isfinite(x->delta)) {
          s.max_delta = std::max(s.max_delta, std::abs(x->delta));
          s.max_delta_bound = std::max(s.max_delta_bound, x->delta_bound);
        }
      }
      if (row.leader.t < c.steady_after) continue;
      ++n_steady;
      s.steady_max_err_deg = std::max(s.steady_max_err_deg, err);
      s.steady_force_sum_max = std::max(s.steady_force_sum_max, std::abs(l.tau_e + f.tau_e));
      if (contact_axis) {
        sum_contact += std::abs(f.applied);
        sum_pen += std::max(0.0, rad2deg(f.theta - c.environment.contact_angle));
      }
    }
    if (!r.rows.empty()) s.mean_err_deg = sum_err / r.rows.size();
    if (contact_axis && n_steady) {
      s.contact_torque = sum_contact / n_steady;
      s.penetration_deg = sum_pen / n_steady;
      s.force_ratio = s.contact_torque > 0 ? s.steady_force_sum_max / s.contact_torque
                                           : std::numeric_limits<double>::infinity();
    }
  }
  r.finite = true;
  for (const auto& row : r.rows) {
    r.finite = r.finite && finite_row(row.leader) && finite_row(row.follower);
    wl.push_back(row.leader.wall);
    wf.push_back(row.follower.wall);
  }
  r.wall_leader = wall_stats(wl, c.t_s);
  r.wall_follower = wall_stats(wf, c.t_s);
}

RunReport run_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  RunReport r;
  r.config = cfg;
  const auto t0 = Clock::now();
  if (cfg.scenario == Scenario::kIdentification) {
    IdentificationSummary id;
    for (AxisId a : kAxes) {
      IdentificationOptions o = IdentificationOptions::for_axis(a);
      o.truth = cfg.truth;
      o.noise_sigma = cfg.noise_sigma;
      o.seed = cfg.seed;
      IdentificationDataset st, sw;
      id.fits[index(a)] = identify(o, &st, &sw);
      id.errors[index(a)] = coefficient_errors(a, id.fits[index(a)].params, cfg.truth);
      id.clamp_events[index(a)] = st.clamp_events + sw.clamp_events - st.startup_clamps - sw.startup_clamps;
    }
    r.identification = std::move(id);
  } else {
    std::optional<KeyPair> keys;
    if (cfg.mode != ControlMode::kPlain) keys = session_keys(cfg);
    if (cfg.transport == TransportKind::kUdp) {
      r.rows = run_udp(cfg, *keys, &r);
    } else {
      r.rows = run_inproc(cfg, keys ? &*keys : nullptr, &r);
    }
    summarize(r);
    if (cfg.scenario == Scenario::kTiming && cfg.mode != ControlMode::kPlain) {
      ScenarioConfig plain = cfg;
      plain.mode = ControlMode::kPlain;
      plain.transport = TransportKind::kInproc;
      RunReport pr;
      pr.config = plain;
      pr.rows = run_inproc(plain, nullptr, &pr);
      summarize(pr);
      r.plain_wall = pr.wall_leader;
    }
  }
  r.elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
  if (!cfg.csv_path.empty() && cfg.scenario != Scenario::kIdentification) {
    std::ofstream out(cfg.csv_path);
    if (!out) throw ConfigError("cannot write '" + cfg.csv_path + "'");
    write_csv(r, out);
  }
  if (!cfg.timing_csv_path.empty() && cfg.scenario != Scenario::kIdentification) {
    std::ofstream out(cfg.timing_csv_path);
    if (!out) throw ConfigError("cannot write '" + cfg.timing_csv_path + "'");
    write_timing_csv(r, out);
  }
  if (!cfg.json_path.empty()) {
    std::ofstream out(cfg.json_path);
    if (!out) throw ConfigError("cannot write '" + cfg.json_path + "'");
    out << summary_json(r) << "\n";
  }
  return r;
}

void write_csv(const RunReport& r, std::ostream& out) {
  static const char* const kAxisCols[] = {
      "theta_l_deg", "theta_f_deg", "err_deg",     "tau_e_l",       "tau_e_f",  "tau_e_sum",
      "i_l",         "i_f",         "i_plain_l",   "i_enc_l",       "delta_l",  "delta_bound_l",
      "eval_err_l",  "i_plain_f",   "i_enc_f",     "delta_f",       "delta_bound_f", "eval_err_f",
      "tau_hand",    "tau_object"};
  out << "seq,t";
  for (AxisId a : kAxes)
    for (const char* col : kAxisCols) out << ',' << axis_name(a) << '_' << col;
  out << ",fresh_l,fresh_f,alarm_l,alarm_f\n";
  char buf[32];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << ',' << buf;
  };
  for (const auto& row : r.rows) {
    out << row.leader.seq;
    num(row.leader.t);
    for (AxisId a : kAxes) {
      const AxisRecord& l = row.leader.axes[index(a)];
      const AxisRecord& f = row.follower.axes[index(a)];
      for (double v : {rad2deg(l.theta), rad2deg(f.theta), rad2deg(l.theta - f.theta), l.tau_e, f.tau_e,
                       l.tau_e + f.tau_e, l.current, f.current, l.i_plain, l.i_enc, l.delta, l.delta_bound,
                       l.eval_error, f.i_plain, f.i_enc, f.delta, f.delta_bound, f.eval_error, l.applied, f.applied})
        num(v);
    }
    out << ',' << row.leader.fresh_remote << ',' << row.follower.fresh_remote << ',' << row.leader.alarm << ','
        << row.follower.alarm << '\n';
  }
}

void write_timing_csv(const RunReport& r, std::ostream& out) {
  out << "seq,wall_l,wall_f\n";
  char buf[64];
  for (const auto& row : r.rows) {
    std::snprintf(buf, sizeof(buf), "%llu,%.9g,%.9g\n", static_cast<unsigned long long>(row.leader.seq),
                  row.leader.wall, row.follower.wall);
    out << buf;
  }
}

namespace {

nlohmann::json wall_json(const WallStats& w) {
  return {{"samples", w.samples}, {"mean_s", w.mean},        {"p99_s", w.p99},
          {"max_s", w.max},       {"deadline_misses", w.deadline_misses}};
}

}  // namespace

std::string summary_json(const RunReport& r) {
  using nlohmann::json;
  const ScenarioConfig& c = r.config;
  json j;
  j["schema"] = kCsvSchema;
  j["scenario"] = scenario_name(c.scenario);
  j["mode"] = mode_name(c.mode);
  j["transport"] = c.transport == TransportKind::kUdp ? "udp" : "inproc";
  j["duration_s"] = c.duration;
  j["t_s"] = c.t_s;
  j["crypto"] = {{"lambda", c.lambda}, {"gamma_c", c.gamma_c}, {"gamma_p", c.gamma_p}, {"seed", c.seed}};
  j["elapsed_s"] = r.elapsed;
  if (r.identification) {
    json id;
    for (AxisId a : kAxes) {
      const std::size_t i = index(a);
      const FitReport& f = r.identification->fits[i];
      json ax{{"ok", f.ok}, {"error", f.error}, {"rms_static", f.rms_static}, {"rms_sweep", f.rms_sweep},
              {"clamp_events", r.identification->clamp_events[i]}};
      for (const auto& [name, e] : r.identification->errors[i]) ax["relative_error"][name] = e;
      if (a == AxisId::kYaw) {
        const YawTerms& y = f.params.yaw;
        ax["fit"] = {{"a_c", y.a_c}, {"b_c", y.b_c}, {"a_f1", y.a_f1}, {"b_f1", y.b_f1}, {"c_f1", y.c_f1},
                     {"d_f1", y.d_f1}};
      } else {
        const PitchTerms& p = f.params.pitch;
        ax["fit"] = {{"a_g", p.a_g},   {"b_g", p.b_g},   {"c_g", p.c_g},   {"a_f2", p.a_f2},
                     {"b_f2", p.b_f2}, {"c_f2", p.c_f2}, {"d_f2", p.d_f2}, {"e_f2", p.e_f2}};
      }
      id[axis_name(a)] = ax;
    }
    id["noise_sigma"] = c.noise_sigma;
    j["identification"] = id;
  } else {
    j["steps"] = r.rows.size();
    j["finite"] = r.finite;
    for (AxisId a : kAxes) {
      const AxisSummary& s = r.axes[index(a)];
      j["axes"][axis_name(a)] = {{"max_err_deg", s.max_err_deg},
                                 {"mean_err_deg", s.mean_err_deg},
                                 {"steady_max_err_deg", s.steady_max_err_deg},
                                 {"steady_force_sum_max", s.steady_force_sum_max},
                                 {"contact_torque", s.contact_torque},
                                 {"force_ratio", s.force_ratio},
                                 {"penetration_deg", s.penetration_deg},
                                 {"max_delta", s.max_delta},
                                 {"max_delta_bound", s.max_delta_bound},
                                 {"clamps_leader", s.clamps_leader},
                                 {"clamps_follower", s.clamps_follower}};
    }
    j["timing"]["leader"] = wall_json(r.wall_leader);
    j["timing"]["follower"] = wall_json(r.wall_follower);
    if (r.plain_wall) {
      j["timing"]["plain_leader"] = wall_json(*r.plain_wall);
      j["timing"]["overhead_mean_s"] = r.wall_leader.mean - r.plain_wall->mean;
    }
    j["alarms"] = r.alarms;
    j["stale_alarms"] = r.stale_alarms;
    j["max_signal_slack"] = r.max_signal_slack;
    j["messages"] = {{"sent", r.messages_sent}, {"dropped", r.messages_dropped}};
  }
  json checks = json::array();
  for (const auto& ck : check_report(r)) checks.push_back({{"name", ck.name}, {"pass", ck.pass}, {"detail", ck.detail}});
  j["checks"] = checks;
  return j.dump(2);
}

std::vector<CheckResult> check_report(const RunReport& r) {
  const ScenarioConfig& c = r.config;
  std::vector<CheckResult> out;
  char buf[256];
  auto add = [&](std::string name, bool pass, const char* fmt, auto... args) {
    std::snprintf(buf, sizeof(buf), fmt, args...);
    out.push_back({std::move(name), pass, buf});
  };
  if (c.scenario == Scenario::kIdentification) {
    if (!r.identification) return out;
    const double tol = c.noise_sigma > 0 ? 0.05 : 0.01;
    for (AxisId a : kAxes) {
      const std::size_t i = index(a);
      const FitReport& f = r.identification->fits[i];
      add(std::string(axis_name(a)) + ".fit", f.ok, "%s", f.ok ? "converged" : f.error.c_str());
      for (const auto& [name, e] : r.identification->errors[i])
        add(std::string(axis_name(a)) + "." + name, e <= tol, "error %.3g (limit %.3g)", e, tol);
    }
    return out;
  }
  add("finite", r.finite, "%s", r.finite ? "all samples finite" : "state diverged");
  if (c.mode != ControlMode::kPlain) add("alarms", r.alarms == 0, "%zu alarms", r.alarms);
  switch (c.scenario) {
    case Scenario::kFreeMotion:
      for (AxisId a : kAxes) {
        const AxisSummary& s = r.axes[index(a)];
        const double lim = c.tracking_bound_deg[index(a)];
        add(std::string(axis_name(a)) + ".tracking", r.finite && s.steady_max_err_deg <= lim,
            "steady max |theta_l - theta_f| = %.4g deg (limit %.3g)", s.steady_max_err_deg, lim);
      }
      break;
    case Scenario::kContactHard:
    case Scenario::kContactSoft: {
      const AxisSummary& s = r.axes[index(c.environment.axis)];
      add("force_sum", r.finite && s.force_ratio <= c.force_ratio_max,
          "steady max |tau_l + tau_f| = %.4g Nm = %.3g of contact torque %.4g Nm (limit %.3g)",
          s.steady_force_sum_max, s.force_ratio, s.contact_torque, c.force_ratio_max);
      add("contact", r.finite && s.penetration_deg > 0 && s.penetration_deg <= c.penetration_max_deg,
          "steady penetration %.4g deg (limit %.3g)", s.penetration_deg, c.penetration_max_deg);
      break;
    }
    case Scenario::kShadowQuantization: {
      double dmax = 0, bmax = 0;
      std::size_t over = 0;
      for (const auto& s : r.axes) {
        dmax = std::max(dmax, s.max_delta);
        bmax = std::max(bmax, s.max_delta_bound);
      }
      for (const auto& row : r.rows)
        for (const NodeStepRecord* n : {&row.leader, &row.follower})
          for (const auto& a : n->axes)
            if (std::abs(a.eval_error) > a.delta_bound) ++over;
      add("delta", dmax <= c.delta_max, "max |delta| = %.3g A (limit %.3g)", dmax, c.delta_max);
      add("eval_bound", over == 0, "%zu evaluations above the codec bound (max bound %.3g A)", over, bmax);
      break;
    }
    case Scenario::kTiming:
      add("deadline", r.wall_leader.deadline_misses == 0 && r.wall_follower.deadline_misses == 0,
          "max step %.3g ms / %.3g ms, misses %zu / %zu", r.wall_leader.max * 1e3, r.wall_follower.max * 1e3,
          r.wall_leader.deadline_misses, r.wall_follower.deadline_misses);
      break;
    case Scenario::kIdentification:
      break;
  }
  return out;
}

}  // namespace etel

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

#include "etel/node.hpp"

#include <chrono>
#include <cmath>

#include "etel/errors.hpp"

namespace etel {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

const char* mode_name(ControlMode m) {
  switch (m) {
    case ControlMode::kPlain:
      return "plain";
    case ControlMode::kEncrypted:
      return "encrypted";
    case ControlMode::kShadow:
      return "shadow";
  }
  return "?";
}

ControlMode parse_mode(const std::string& s) {
  if (s == "plain") return ControlMode::kPlain;
  if (s == "encrypted") return ControlMode::kEncrypted;
  if (s == "shadow") return ControlMode::kShadow;
  throw ConfigError("unknown mode '" + s + "' (plain | encrypted | shadow)");
}

Node::Node(NodeSetup setup, const KeyPair* keys, std::uint64_t seed)
    : setup_(std::move(setup)),
      arm_(setup_.motors, setup_.truth),
      rng_(std::make_unique<RandomSource>(seed)),
      keys_(keys) {
  arm_.set_state(setup_.initial);
  const bool need_plain = setup_.mode != ControlMode::kEncrypted;
  const bool need_enc = setup_.mode != ControlMode::kPlain;
  if (need_enc && !keys_) throw ConfigError("node: encrypted operation needs a session key");
  for (AxisId a : kAxes) {
    const std::size_t i = index(a);
    if (setup_.gains[i].t_s != setup_.gains[0].t_s) throw ConfigError("node: axes must share T_s");
    matrices_[i] = assemble_phi(setup_.gains[i], setup_.motors[i]);
    diff_[i] = std::make_unique<PseudoDifferentiator>(setup_.gains[i].g_p, setup_.gains[i].t_s);
    if (need_plain) plain_[i] = std::make_unique<PlainAxisController>(matrices_[i]);
    if (need_enc)
      enc_[i] = std::make_unique<EncryptedAxisController>(matrices_[i], *keys_, setup_.gamma_c, setup_.gamma_p,
                                                          *rng_);
  }
}

Node::~Node() = default;

std::size_t Node::alarms() const {
  std::size_t n = 0;
  for (const auto& e : enc_)
    if (e) n += e->alarms();
  return n;
}

unsigned long Node::max_signal_slack() const {
  unsigned long s = 0;
  for (const auto& e : enc_)
    if (e) s = std::max(s, e->max_signal_slack());
  return s;
}

NodeMessage Node::begin_step(std::uint64_t k) {
  auto t0 = Clock::now();
  NodeMessage msg;
  msg.seq = k;
  for (AxisId a : kAxes) {
    const std::size_t i = index(a);
    theta_[i] = arm_.state()[a].theta;
    omega_[i] = diff_[i]->step(theta_[i]);
    f_[i] = nonlinear_torque(setup_.model, a, theta_[i], omega_[i]);
  }
  if (setup_.mode == ControlMode::kEncrypted) {
    WireMessage w;
    w.session_id = setup_.session_id;
    w.seq = k;
    w.role = setup_.role;
    w.axes.resize(kAxisCount);
    for (std::size_t i = 0; i < kAxisCount; ++i) {
      enc_theta_[i] = enc_[i]->encrypt_value(theta_[i]);
      w.axes[i].enc_theta = enc_theta_[i];
      w.axes[i].force_row = enc_[i]->outbound_row();
    }
    msg.wire = std::move(w);
  } else {
    for (std::size_t i = 0; i < kAxisCount; ++i) {
      msg.theta[i] = theta_[i];
      msg.tau_e[i] = plain_[i]->tau_e_self_prev();
    }
  }
  begin_wall_ = seconds_since(t0);
  return msg;
}

NodeStepRecord Node::finish_step(std::uint64_t k, const NodeMessage* remote) {
  NodeStepRecord rec;
  rec.seq = k;
  rec.t = static_cast<double>(k) * t_s();

  bool fresh = remote != nullptr;
  if (fresh && setup_.mode == ControlMode::kEncrypted &&
      (!remote->wire || remote->wire->axes.size() != kAxisCount)) {
    fresh = false;
    rec.alarm = true;
  }
  if (fresh) {
    staleness_ = 0;
    if (setup_.mode == ControlMode::kEncrypted) {
      remote_wire_ = remote->wire;
    } else {
      remote_theta_ = remote->theta;
      remote_tau_ = remote->tau_e;
    }
  } else if (++staleness_ >= setup_.stale_alarm_threshold) {
    ++stale_alarms_;
  }
  rec.fresh_remote = fresh;
  rec.staleness = staleness_;

  auto t0 = Clock::now();
  std::array<double, kAxisCount> currents{};
  for (AxisId a : kAxes) {
    const std::size_t i = index(a);
    AxisRecord& ar = rec.axes[i];
    ar.theta = theta_[i];
    ar.omega = omega_[i];
    ar.f = f_[i];
    AxisSignals s;
    s.theta_other = remote_theta_[i];
    s.theta_self = theta_[i];
    s.omega = omega_[i];
    s.tau_e_other = remote_tau_[i];
    s.f = f_[i];

    ControllerOutput out;
    switch (setup_.mode) {
      case ControlMode::kPlain:
        out = plain_[i]->step(s);
        ar.i_plain = out.current;
        ar.i_enc = std::nan("");
        ar.delta = std::nan("");
        ar.eval_error = std::nan("");
        break;
      case ControlMode::kShadow: {
        const double tau_self = plain_[i]->tau_e_self_prev();
        out = plain_[i]->step(s);
        double bound = 0.0, exact = 0.0;
        ControllerOutput enc = enc_[i]->shadow_step(s, tau_self, nullptr, &bound, &exact);
        ar.eval_error = enc.current - exact;
        ar.i_plain = out.current;
        ar.i_enc = enc.current;
        ar.delta = out.current - enc.current;
        ar.delta_bound = bound;
        break;
      }
      case ControlMode::kEncrypted: {
        EncryptedAxisController::Inputs in;
        in.enc_theta_self = &enc_theta_[i];
        in.theta_self = theta_[i];
        if (fresh) {
          in.enc_theta_other = &remote_wire_->axes[i].enc_theta;
          in.remote_row = &remote_wire_->axes[i].force_row;
        }
        in.omega = omega_[i];
        in.f = f_[i];
        EncryptedAxisController::Result r = enc_[i]->step(in);
        out = r.out;
        rec.alarm = rec.alarm || r.alarm;
        ar.i_plain = std::nan("");
        ar.i_enc = out.current;
        ar.delta = std::nan("");
        ar.eval_error = std::nan("");
        break;
      }
    }
    ar.tau_d = out.tau_d;
    ar.tau_e = out.tau_e;
    ar.current = out.current;
    currents[i] = out.current;
  }
  rec.wall = seconds_since(t0) + begin_wall_;

  std::array<AppliedTorque, kAxisCount> applied{};
  for (AxisId a : kAxes) {
    const std::size_t i = index(a);
    if (setup_.role == Role::kLeader) {
      const OperatorModel* hand = &setup_.hand;
      applied[i] = [hand, a](double t, double th, double w) { return operator_torque(*hand, a, t, th, w); };
    } else if (setup_.environment.enabled && setup_.environment.axis == a) {
      const EnvironmentModel* env = &setup_.environment;
      applied[i] = [env](double, double th, double w) { return environment_torque(*env, th, w); };
    }
    const AxisState& st = arm_.state()[a];
    rec.axes[i].applied = applied[i] ? applied[i](rec.t, st.theta, st.omega) : 0.0;
  }
  arm_.advance(currents, applied, rec.t, t_s(), setup_.substeps);
  return rec;
}

}  // namespace etel

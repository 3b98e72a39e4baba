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
#include <memory>
#include <optional>
#include <string>

#include "etel/controller.hpp"
#include "etel/encrypted.hpp"
#include "etel/plant.hpp"
#include "etel/wire.hpp"

namespace etel {

enum class ControlMode {
  kPlain,      // unencrypted controller drives the arm
  kEncrypted,  // encrypted controller drives the arm; ciphertexts on the link
  kShadow,     // plain drives the arm; encrypted evaluator fed the same inputs
};
const char* mode_name(ControlMode m);
ControlMode parse_mode(const std::string& s);

struct NodeSetup {
  Role role = Role::kLeader;
  ControlMode mode = ControlMode::kPlain;
  std::array<ControllerGains, kAxisCount> gains{ControllerGains::yaw(), ControllerGains::pitch()};
  // j_bar / k_t feed the controller; j_true / k_true the simulated arm.
  std::array<MotorParams, kAxisCount> motors{MotorParams::yaw(), MotorParams::pitch()};
  NonlinearTermParams model = NonlinearTermParams::identified();  // controller's f
  NonlinearTermParams truth = NonlinearTermParams::identified();  // plant's f
  ArmState initial{};
  int substeps = 10;
  OperatorModel hand;  // applied to the leader
  EnvironmentModel environment;  // applied to the follower
  double gamma_c = 1e16;
  double gamma_p = 1e16;
  std::uint64_t session_id = 0;
  std::size_t stale_alarm_threshold = 5;
};

// Everything one node sends per control period.
struct NodeMessage {
  std::uint64_t seq = 0;
  std::array<double, kAxisCount> theta{};  // plain link only
  std::array<double, kAxisCount> tau_e{};  // plain link only
  std::optional<WireMessage> wire;         // encrypted link
};

struct AxisRecord {
  double theta = 0.0;
  double omega = 0.0;
  double f = 0.0;
  double tau_d = 0.0;
  double tau_e = 0.0;
  double current = 0.0;  // command applied over the next period
  double i_plain = 0.0;
  double i_enc = 0.0;
  double delta = 0.0;
  double delta_bound = 0.0;  // codec bound on one encrypted evaluation
  double eval_error = 0.0;   // i_enc - Phi*xi on the encrypted path's own xi
  double applied = 0.0;  // hand or object torque at the sample instant
};

struct NodeStepRecord {
  std::uint64_t seq = 0;
  double t = 0.0;
  std::array<AxisRecord, kAxisCount> axes{};
  double wall = 0.0;  // controller evaluation wall time, both axes, s
  bool fresh_remote = false;
  std::size_t staleness = 0;
  bool alarm = false;
};

// One side of the teleoperation link: arm, pseudo-differentiators and the
// per-axis controllers. Each period runs begin_step (sample, build the
// outbound message) then finish_step (consume the peer's message, compute
// the currents, advance the arm).
class Node {
 public:
  Node(NodeSetup setup, const KeyPair* keys, std::uint64_t seed);
  ~Node();
  Node(const Node&) = delete;
  Node& operator=(const Node&) = delete;

  NodeMessage begin_step(std::uint64_t k);
  NodeStepRecord finish_step(std::uint64_t k, const NodeMessage* remote);

  Role role() const { return setup_.role; }
  const NodeSetup& setup() const { return setup_; }
  const Arm& arm() const { return arm_; }
  std::size_t alarms() const;
  std::size_t stale_alarms() const { return stale_alarms_; }
  unsigned long max_signal_slack() const;
  const ControllerMatrices& matrices(AxisId a) const { return matrices_[index(a)]; }

 private:
  double t_s() const { return setup_.gains[0].t_s; }

  NodeSetup setup_;
  Arm arm_;
  std::unique_ptr<RandomSource> rng_;
  const KeyPair* keys_;
  std::array<ControllerMatrices, kAxisCount> matrices_;
  std::array<std::unique_ptr<PseudoDifferentiator>, kAxisCount> diff_;
  std::array<std::unique_ptr<PlainAxisController>, kAxisCount> plain_;
  std::array<std::unique_ptr<EncryptedAxisController>, kAxisCount> enc_;

  // Per-period samples shared by the two phases.
  std::array<double, kAxisCount> theta_{}, omega_{}, f_{};
  std::array<Ciphertext, kAxisCount> enc_theta_{};
  double begin_wall_ = 0.0;

  // Held remote values.
  std::array<double, kAxisCount> remote_theta_{}, remote_tau_{};
  std::optional<WireMessage> remote_wire_;
  std::size_t staleness_ = 0;
  std::size_t stale_alarms_ = 0;
};

}  // namespace etel

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

#include "etel/observer.hpp"

#include "etel/errors.hpp"

namespace etel {

void ControllerGains::validate() const {
  if (!(k_p >= 0 && k_d >= 0 && k_f >= 0)) throw ConfigError("gains: K_p, K_d, K_f must be non-negative");
  if (!(g_p > 0 && g_d > 0 && g_r > 0 && t_s > 0))
    throw ConfigError("gains: cut-off frequencies and T_s must be positive");
}

DiscreteObserver tustin(const FirstOrderSystem& sys, double t_s) {
  const double den = 1.0 - sys.a * t_s / 2.0;
  if (den == 0.0) throw DomainError("tustin: pole at 2/T_s");
  const double alpha = 1.0 / den;
  DiscreteObserver o;
  o.a = alpha * (1.0 + sys.a * t_s / 2.0);
  o.c = sys.c * alpha;
  for (int j = 0; j < 3; ++j) {
    o.b[j] = alpha * sys.b[j] * t_s;
    o.d[j] = sys.d[j] + sys.c * alpha * sys.b[j] * t_s / 2.0;
  }
  return o;
}

FirstOrderSystem continuous_dob(const ControllerGains& g, const MotorParams& m) {
  FirstOrderSystem s;
  s.a = -g.g_d;
  s.b = {m.k_t * g.g_d, m.j_bar * g.g_d * g.g_d, 0.0};
  s.c = 1.0;
  s.d = {0.0, -m.j_bar * g.g_d, 0.0};
  return s;
}

FirstOrderSystem continuous_rfob(const ControllerGains& g, const MotorParams& m) {
  FirstOrderSystem s;
  s.a = -g.g_r;
  s.b = {m.k_t * g.g_r, m.j_bar * g.g_r * g.g_r, -g.g_r};
  s.c = 1.0;
  s.d = {0.0, -m.j_bar * g.g_r, 0.0};
  return s;
}

FirstOrderSystem continuous_pseudo_differentiator(double g_p) {
  FirstOrderSystem s;
  s.a = -g_p;
  s.b = {1.0, 0.0, 0.0};
  s.c = -g_p * g_p;
  s.d = {g_p, 0.0, 0.0};
  return s;
}

DiscreteObserver build_pseudo_differentiator(double g_p, double t_s) {
  if (!(g_p > 0 && t_s > 0)) throw ConfigError("pseudo-differentiator: g_p and T_s must be positive");
  return tustin(continuous_pseudo_differentiator(g_p), t_s);
}

DiscreteObserver build_dob(const ControllerGains& g, const MotorParams& m) {
  g.validate();
  return tustin(continuous_dob(g, m), g.t_s);
}

DiscreteObserver build_rfob(const ControllerGains& g, const MotorParams& m) {
  g.validate();
  return tustin(continuous_rfob(g, m), g.t_s);
}

double PseudoDifferentiator::step(double theta) {
  if (!primed_) {
    // Start from rest at the first sample instead of seeing a step from 0.
    f_.state = f_.b[0] * theta / (1.0 - f_.a);
    primed_ = true;
  }
  return f_.step({theta, 0.0, 0.0});
}

}  // namespace etel

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

#include "etel/identification.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <utility>
#include <limits>
#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

#include "etel/bigint.hpp"
#include "etel/errors.hpp"
#include "etel/observer.hpp"

namespace etel {

namespace {

constexpr int kSubsteps = 10;
constexpr double kSweepAccel = 4.0;   // rad/s^2
constexpr double kSettle = 0.3;       // s excluded after each transient
constexpr double kStopMargin = 5.0;   // deg

struct Reference {
  double theta, omega, alpha;
};

// Single-axis rig: plant, pseudo-differentiator,
// DOB-compensated PD loop. The DOB consumes the previous current, as the
// teleoperation controller does.
class Rig {
 public:
  Rig(const IdentificationOptions& o, double theta0, FrictionModel friction, AppliedTorque applied = nullptr)
      : o_(o),
        friction_(friction),
        applied_(std::move(applied)),
        diff_(o.g_p, o.t_s),
        dob_(build_dob(ControllerGains{0, 0, 0, o.g_p, o.g_d, o.g_d, o.t_s}, o.motor)),
        lim_(SoftLimits::for_axis(o.axis)) {
    // The schedules end exactly on the soft limits; the rig's stop sits a
    // little outside so that an end hold is not resting against it.
    lim_.lo -= deg2rad(kStopMargin);
    lim_.hi += deg2rad(kStopMargin);
    s_.theta = theta0;
  }

  // One control period; returns the DOB estimate used for this period.
  double step(const Reference& r) {
    const double theta = s_.theta;
    const double w = diff_.step(theta);
    const double tau = dob_.step({i_, w, 0.0});
    const double acc = o_.k_p * (r.theta - theta) + o_.k_d * (r.omega - w) + r.alpha;
    i_ = (o_.motor.j_bar * acc + tau) / o_.motor.k_t;
    last_theta_ = theta;
    const double dt = o_.t_s / kSubsteps;
    for (int k = 0; k < kSubsteps; ++k) {
      s_ = step_dynamics(s_, o_.motor, o_.truth, o_.axis, i_, applied_, t_ + k * dt, dt, friction_);
      if (s_.theta > lim_.hi || s_.theta < lim_.lo) {
        ++clamps_;
        s_.theta = std::clamp(s_.theta, lim_.lo, lim_.hi);
        s_.omega = 0.0;
      }
    }
    t_ += o_.t_s;
    return tau;
  }

  double sampled_theta() const { return last_theta_; }
  std::size_t clamps() const { return clamps_; }

 private:
  const IdentificationOptions& o_;
  FrictionModel friction_;
  AppliedTorque applied_;
  PseudoDifferentiator diff_;
  DiscreteObserver dob_;
  SoftLimits lim_;
  AxisState s_{};
  double i_ = 0.0;
  double t_ = 0.0;
  double last_theta_ = 0.0;
  std::size_t clamps_ = 0;
};

// Quintic move from a to b over `dur`.
Reference blend(double a, double b, double dur, double t) {
  if (t >= dur) return {b, 0.0, 0.0};
  const double u = t / dur;
  const double s = u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
  const double ds = 30.0 * u * u * (1.0 - u) * (1.0 - u) / dur;
  const double dds = 60.0 * u * (1.0 - u) * (1.0 - 2.0 * u) / (dur * dur);
  return {a + (b - a) * s, (b - a) * ds, (b - a) * dds};
}

// Trapezoidal velocity leg from a to b at speed v.
struct Leg {
  double a, b, v, t_acc, t_cruise;
  Leg(double a_, double b_, double v_) : a(a_), b(b_), v(v_) {
    t_acc = v / kSweepAccel;
    const double cruise = std::abs(b - a) - v * t_acc;
    if (cruise <= 0) throw ConfigError("identification: sweep range too short for speed");
    t_cruise = cruise / v;
  }
  double duration() const { return 2 * t_acc + t_cruise; }
  Reference at(double t) const {
    const double sg = b > a ? 1.0 : -1.0;
    const double acc = kSweepAccel;
    if (t <= 0) return {a, 0, 0};
    if (t < t_acc) return {a + sg * 0.5 * acc * t * t, sg * acc * t, sg * acc};
    const double d_acc = 0.5 * acc * t_acc * t_acc;
    if (t < t_acc + t_cruise) return {a + sg * (d_acc + v * (t - t_acc)), sg * v, 0.0};
    const double td = t - t_acc - t_cruise;
    if (td < t_acc) return {a + sg * (d_acc + v * t_cruise + v * td - 0.5 * acc * td * td), sg * (v - acc * td), -sg * acc};
    return {b, 0, 0};
  }
};

// Delay with which the rig's DOB estimate follows a drifting disturbance,
// measured on the nominal model under a ramp load: estimate(t) ~ d(t - L).
double estimation_lag(const IdentificationOptions& o) {
  IdentificationOptions nom = o;
  nom.motor.j_true = nom.motor.j_bar;
  nom.motor.k_true = nom.motor.k_t;
  nom.truth = NonlinearTermParams::zero();
  const double rate = 1e-3;  // Nm/s
  const SoftLimits lim = SoftLimits::for_axis(o.axis);
  const double mid = 0.5 * (lim.lo + lim.hi);
  Rig rig(nom, mid, FrictionModel::kNone, [rate](double t, double, double) { return -rate * t; });
  const int steps = static_cast<int>(std::llround(1.0 / o.t_s));
  double tau = 0.0;
  for (int k = 0; k < steps; ++k) tau = rig.step({mid, 0.0, 0.0});
  return ((steps - 1) * o.t_s * rate - tau) / rate;
}

std::pair<double, double> sweep_range(AxisId axis) {
  if (axis == AxisId::kYaw) return {deg2rad(-90.0), deg2rad(90.0)};
  return {deg2rad(15.0), deg2rad(75.0)};
}

// Generic functor for Eigen's Levenberg-Marquardt with numerical Jacobian.
struct Residuals {
  using Scalar = double;
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

  int n_in, n_val;
  std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)> f;
  int inputs() const { return n_in; }
  int values() const { return n_val; }
  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& out) const {
    f(x, out);
    return 0;
  }
};

Eigen::VectorXd levenberg_marquardt(Residuals r, Eigen::VectorXd x0) {
  Eigen::NumericalDiff<Residuals, Eigen::Central> nd(r);
  Eigen::LevenbergMarquardt<Eigen::NumericalDiff<Residuals, Eigen::Central>> lm(nd);
  lm.parameters.maxfev = 20000;
  lm.parameters.xtol = 1e-14;
  lm.parameters.ftol = 1e-14;
  lm.minimize(x0);
  return x0;
}

// Best linear coefficients for fixed nonlinear parameters; returns SSE.
double linear_fit(const Eigen::MatrixXd& a, const Eigen::VectorXd& y, Eigen::VectorXd* coef) {
  *coef = a.colPivHouseholderQr().solve(y);
  return (a * *coef - y).squaredNorm();
}

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g;
  for (int i = 0; i < n; ++i) g.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
  return g;
}

double rms(const Eigen::VectorXd& r) { return r.size() ? std::sqrt(r.squaredNorm() / r.size()) : 0.0; }

}  // namespace

IdentificationOptions IdentificationOptions::for_axis(AxisId axis) {
  IdentificationOptions o;
  o.axis = axis;
  o.motor = MotorParams::for_axis(axis);
  if (axis == AxisId::kPitch) {
    // Gravity (angle in degrees) is a negative spring of ~0.5 Nm/rad on a
    // 4.1e-5 kg m^2 rotor: the hold loop must be faster than that.
    o.t_s = 0.001;
    o.k_p = 2500.0;
    o.k_d = 100.0;
    o.g_d = 500.0;
  }
  return o;
}

std::vector<double> static_schedule(AxisId axis) {
  std::vector<double> v;
  if (axis == AxisId::kYaw) {
    for (int d = -120; d <= 120; d += 10) v.push_back(deg2rad(d));
  } else {
    for (int d = 10; d <= 80; d += 10) v.push_back(deg2rad(d));
  }
  return v;
}

std::vector<double> velocity_schedule() {
  std::vector<double> v;
  for (int k = 1; k <= 10; ++k) v.push_back(0.05 * k);
  for (int k = 6; k <= 10; ++k) v.push_back(0.1 * k);
  return v;
}

IdentificationDataset run_static_test(const IdentificationOptions& o) {
  IdentificationDataset ds;
  ds.axis = o.axis;
  RandomSource noise(o.seed);
  const auto sched = static_schedule(o.axis);
  Rig rig(o, sched.front(), FrictionModel::kNone);
  for (int k = 0; k < static_cast<int>(std::llround(2.0 / o.t_s)); ++k) rig.step({sched.front(), 0.0, 0.0});
  ds.startup_clamps = rig.clamps();
  double prev = sched.front();
  const double move = 1.0;
  for (double target : sched) {
    const int steps = static_cast<int>(std::llround((move + o.hold) / o.t_s));
    const int window = static_cast<int>(std::llround(0.5 * o.hold / o.t_s));
    double sum_tau = 0.0, sum_th = 0.0;
    for (int k = 0; k < steps; ++k) {
      const double tau = rig.step(blend(prev, target, move, k * o.t_s));
      if (k >= steps - window) {
        sum_tau += tau + (o.noise_sigma > 0 ? noise.normal(o.noise_sigma) : 0.0);
        sum_th += rig.sampled_theta();
      }
    }
    ds.statics.push_back({sum_th / window, sum_tau / window});
    prev = target;
  }
  ds.clamp_events = rig.clamps();
  return ds;
}

IdentificationDataset run_velocity_test(const IdentificationOptions& o, const NonlinearTermParams& static_fit) {
  IdentificationDataset ds;
  ds.axis = o.axis;
  RandomSource noise(o.seed ^ 0x5eedULL);
  const auto [lo, hi] = sweep_range(o.axis);
  Rig rig(o, lo, FrictionModel::kSmooth);
  const double k_lag = estimation_lag(o) / o.t_s;
  // Settle at the start angle before the first leg: the observer starts
  // from zero against the full friction offset.
  for (int k = 0; k < static_cast<int>(std::llround(2.0 / o.t_s)); ++k) rig.step({lo, 0.0, 0.0});
  ds.startup_clamps = rig.clamps();
  for (double v : velocity_schedule()) {
    for (int run = 0; run < o.runs; ++run) {
      for (int dir = 0; dir < 2; ++dir) {
        const Leg leg = dir == 0 ? Leg(lo, hi, v) : Leg(hi, lo, v);
        const double w0 = leg.t_acc + kSettle;
        const double w1 = leg.t_acc + leg.t_cruise;
        if (w1 - w0 < 5 * o.t_s) throw ConfigError("identification: cruise window too short");
        const int steps = static_cast<int>(std::llround((leg.duration() + 0.5) / o.t_s));
        double sum = 0.0, first = 0.0, last = 0.0;
        int n = 0;
        for (int k = 0; k < steps; ++k) {
          const double t = k * o.t_s;
          const double tau = rig.step(leg.at(t));
          if (t < w0 || t >= w1) continue;
          const double meas = tau + (o.noise_sigma > 0 ? noise.normal(o.noise_sigma) : 0.0);
          if (n == 0) first = meas;
          last = meas;
          sum += meas - static_torque(static_fit, o.axis, rig.sampled_theta());
          ++n;
        }
        // The estimate trails a drifting disturbance (gravity / cable
        // tension along the sweep); the mean slope over the window restores it.
        const double slope_comp = n > 1 ? (last - first) / (n - 1) * k_lag : 0.0;
        ds.sweeps.push_back({dir == 0 ? v : -v, sum / n + slope_comp});
      }
    }
  }
  ds.clamp_events = rig.clamps();
  return ds;
}

FitReport fit_static(AxisId axis, const std::vector<StaticPoint>& data) {
  FitReport rep;
  const std::size_t need = axis == AxisId::kYaw ? 2 : 3;
  if (data.size() < need) {
    rep.error = "static fit: need at least " + std::to_string(need) + " points, have " + std::to_string(data.size());
    return rep;
  }
  const int n = static_cast<int>(data.size());
  Eigen::VectorXd th(n), y(n);
  for (int i = 0; i < n; ++i) {
    th[i] = rad2deg(data[i].theta);
    y[i] = data[i].torque;
  }
  if (axis == AxisId::kYaw) {
    Eigen::MatrixXd a(n, 2);
    a.col(0) = th;
    a.col(1).setOnes();
    Eigen::VectorXd c;
    linear_fit(a, y, &c);
    rep.params.yaw.a_c = c[0];
    rep.params.yaw.b_c = c[1];
    rep.rms_static = rms(a * c - y);
  } else {
    // Grid over (b, c) with the amplitude solved linearly, then refine.
    double best = std::numeric_limits<double>::infinity();
    Eigen::Vector3d x0;
    Eigen::MatrixXd a(n, 1);
    for (double b : log_grid(1e-3, 0.2, 240)) {
      for (int ci = 0; ci < 180; ++ci) {
        const double c = -kPi + 2 * kPi * ci / 180.0;
        for (int i = 0; i < n; ++i) a(i, 0) = std::sin(b * th[i] + c);
        Eigen::VectorXd coef;
        const double sse = linear_fit(a, y, &coef);
        if (sse < best) {
          best = sse;
          x0 = {coef[0], b, c};
        }
      }
    }
    Residuals r{3, n, [&](const Eigen::VectorXd& x, Eigen::VectorXd& out) {
                  for (int i = 0; i < n; ++i) out[i] = x[0] * std::sin(x[1] * th[i] + x[2]) - y[i];
                }};
    Eigen::VectorXd x = levenberg_marquardt(r, x0);
    if (x[0] < 0) {  // a sin(u) = -a sin(u + pi)
      x[0] = -x[0];
      x[2] += kPi;
    }
    x[2] = std::remainder(x[2], 2 * kPi);
    Eigen::VectorXd res(n);
    r(x, res);
    rep.params.pitch.a_g = x[0];
    rep.params.pitch.b_g = x[1];
    rep.params.pitch.c_g = x[2];
    rep.rms_static = rms(res);
  }
  rep.ok = std::isfinite(rep.rms_static);
  if (!rep.ok) rep.error = "static fit diverged";
  return rep;
}

FitReport fit_friction(AxisId axis, const std::vector<VelocityPoint>& data, NonlinearTermParams base) {
  FitReport rep;
  rep.params = base;
  const bool yaw = axis == AxisId::kYaw;
  const std::size_t need = yaw ? 4 : 5;
  if (data.size() < need) {
    rep.error = "friction fit: need at least " + std::to_string(need) + " points, have " + std::to_string(data.size());
    return rep;
  }
  const int n = static_cast<int>(data.size());
  Eigen::VectorXd w(n), y(n);
  for (int i = 0; i < n; ++i) {
    w[i] = data[i].omega;
    y[i] = data[i].torque;
  }
  // Linear columns: atan(b w + c), then [1] (yaw) or [w, 1] (pitch).
  const int lin = yaw ? 2 : 3;
  Eigen::MatrixXd a(n, lin);
  auto fill = [&](double b, double c) {
    for (int i = 0; i < n; ++i) {
      a(i, 0) = std::atan(b * w[i] + c);
      if (yaw) {
        a(i, 1) = 1.0;
      } else {
        a(i, 1) = w[i];
        a(i, 2) = 1.0;
      }
    }
  };
  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd x0(lin + 2);
  std::vector<double> bs;
  for (double b : log_grid(0.1, 1e4, 161)) {
    bs.push_back(b);
    bs.push_back(-b);
  }
  for (double b : bs) {
    for (int ci = 0; ci <= 80; ++ci) {
      const double c = -10.0 + 0.25 * ci;
      fill(b, c);
      Eigen::VectorXd coef;
      const double sse = linear_fit(a, y, &coef);
      if (sse < best) {
        best = sse;
        x0 << coef[0], b, c, coef.tail(lin - 1);
      }
    }
  }
  // x = [a, b, c, (d,) e]
  Residuals r{lin + 2, n, [&](const Eigen::VectorXd& x, Eigen::VectorXd& out) {
                for (int i = 0; i < n; ++i) {
                  double v = x[0] * std::atan(x[1] * w[i] + x[2]);
                  v += yaw ? x[3] : x[3] * w[i] + x[4];
                  out[i] = v - y[i];
                }
              }};
  Eigen::VectorXd x = levenberg_marquardt(r, x0);
  if (x[0] < 0) {  // a atan(u) = (-a) atan(-u)
    x[0] = -x[0];
    x[1] = -x[1];
    x[2] = -x[2];
  }
  Eigen::VectorXd res(n);
  r(x, res);
  rep.rms_sweep = rms(res);
  if (yaw) {
    rep.params.yaw.a_f1 = x[0];
    rep.params.yaw.b_f1 = x[1];
    rep.params.yaw.c_f1 = x[2];
    rep.params.yaw.d_f1 = x[3];
  } else {
    rep.params.pitch.a_f2 = x[0];
    rep.params.pitch.b_f2 = x[1];
    rep.params.pitch.c_f2 = x[2];
    rep.params.pitch.d_f2 = x[3];
    rep.params.pitch.e_f2 = x[4];
  }
  rep.ok = std::isfinite(rep.rms_sweep) && x.allFinite();
  if (!rep.ok) rep.error = "friction fit diverged";
  return rep;
}

FitReport identify(const IdentificationOptions& o, IdentificationDataset* static_out,
                   IdentificationDataset* sweep_out) {
  IdentificationDataset st = run_static_test(o);
  FitReport rs = fit_static(o.axis, st.statics);
  if (static_out) *static_out = st;
  if (!rs.ok) return rs;
  IdentificationDataset sw = run_velocity_test(o, rs.params);
  FitReport rf = fit_friction(o.axis, sw.sweeps, rs.params);
  rf.rms_static = rs.rms_static;
  if (sweep_out) *sweep_out = sw;
  return rf;
}

std::vector<std::pair<std::string, double>> coefficient_errors(AxisId axis, const NonlinearTermParams& fit,
                                                               const NonlinearTermParams& truth) {
  // Relative error; coefficients whose true value is zero report the
  // absolute error instead.
  auto err = [](double f, double t) { return t != 0.0 ? std::abs(f - t) / std::abs(t) : std::abs(f - t); };
  std::vector<std::pair<std::string, double>> out;
  if (axis == AxisId::kYaw) {
    const YawTerms &f = fit.yaw, &t = truth.yaw;
    out = {{"a_c", err(f.a_c, t.a_c)},    {"b_c", err(f.b_c, t.b_c)},    {"a_f1", err(f.a_f1, t.a_f1)},
           {"b_f1", err(f.b_f1, t.b_f1)}, {"c_f1", err(f.c_f1, t.c_f1)}, {"d_f1", err(f.d_f1, t.d_f1)}};
  } else {
    const PitchTerms &f = fit.pitch, &t = truth.pitch;
    out = {{"a_g", err(f.a_g, t.a_g)},    {"b_g", err(f.b_g, t.b_g)},    {"c_g", err(f.c_g, t.c_g)},
           {"a_f2", err(f.a_f2, t.a_f2)}, {"b_f2", err(f.b_f2, t.b_f2)}, {"c_f2", err(f.c_f2, t.c_f2)},
           {"d_f2", err(f.d_f2, t.d_f2)}, {"e_f2", err(f.e_f2, t.e_f2)}};
  }
  return out;
}

}  // namespace etel

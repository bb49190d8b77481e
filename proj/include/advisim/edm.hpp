/*
 * Copyright 2026 The advisim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef ADVISIM_EDM_HPP
#define ADVISIM_EDM_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "advisim/common.hpp"
#include "advisim/scenario.hpp"
#include "advisim/trace.hpp"

namespace advisim {

/// Calibratable driver parameters of the three-mode velocity model.
struct EdmParams {
  double a = 1.5;        // max acceleration, m/s^2
  double b = 2.0;        // max deceleration, m/s^2
  double delta = 4.0;    // aggressiveness exponent
  double theta0 = 0.5;   // offset from the reference speed, m/s
  double s_brake = 50.0; // critical braking distance, m

  void validate() const {
    auto pos = [](double x) { return std::isfinite(x) && x > 0.0; };
    if (!pos(a) || !pos(b) || !pos(delta) || !pos(s_brake))
      throw std::invalid_argument("a, b, delta and s_brake must be positive");
    if (!std::isfinite(theta0) || theta0 < 0.0)
      throw std::invalid_argument("theta0 must be non-negative");
  }
};

struct EdmState {
  double v_d = 0.0;   // driver velocity, m/s
  double s_pos = 0.0; // route position, m
  double t = 0.0;     // time, s
};

enum class EdmMode { Accelerate, Decelerate, Stop };

namespace edm_detail {
// Distance-to-stop floor for the stop branch; also the barrier gap held in
// front of an uncleared stop.
inline constexpr double stop_dist_floor = 0.1;  // m
// Velocity floor of the deceleration branch denominator.
inline constexpr double decel_vel_floor = 1e-3;  // m/s
// Slowest crawl used to roll across a stop line while dwelling.
inline constexpr double creep_min = 0.1;  // m/s
// A passed stop counts as cleared this far beyond its line.
inline constexpr double pass_eps = 0.5;  // m
}  // namespace edm_detail

/// Operating-mode selection. The stop condition dominates; otherwise the
/// velocity comparison picks the branch, inclusive at v_d == v_r.
inline EdmMode edm_mode(const EdmParams& params, const EdmState& state,
                        double v_r, std::optional<double> dist_to_stop) {
  if (dist_to_stop && *dist_to_stop < params.s_brake) return EdmMode::Stop;
  return state.v_d < v_r ? EdmMode::Accelerate : EdmMode::Decelerate;
}

/// dv/dt for the mode selected by edm_mode.
inline double edm_derivative(const EdmParams& params, const EdmState& state,
                             double v_r, std::optional<double> dist_to_stop) {
  const EdmMode mode = edm_mode(params, state, v_r, dist_to_stop);
  if (mode == EdmMode::Stop) {
    const double dist = std::max(*dist_to_stop, edm_detail::stop_dist_floor);
    const double q = state.v_d * state.v_d / (2.0 * dist);
    return -(q * q) / params.b;
  }
  const double v_eq = v_r - params.theta0;
  if (!(v_eq > 0.0))
    throw std::domain_error("degenerate reference: v_r <= theta0");
  if (mode == EdmMode::Accelerate) {
    const double ratio = std::max(state.v_d, 0.0) / v_eq;
    return params.a * (1.0 - std::pow(ratio, params.delta));
  }
  const double v_d = std::max(state.v_d, edm_detail::decel_vel_floor);
  return -params.b * (1.0 - std::pow(v_eq / v_d, params.delta));
}

/// Where the reference speed comes from during a simulation: the posted
/// limit at the vehicle's position, or a displayed advisory profile.
struct VrSource {
  enum class Kind { SpeedLimit, Profile } kind = Kind::SpeedLimit;
  const ReferenceProfile* profile = nullptr;

  static VrSource speed_limit() { return VrSource{}; }
  static VrSource advisory(const ReferenceProfile& p) {
    return VrSource{Kind::Profile, &p};
  }
};

struct SimOptions {
  double v0 = 0.0;
  /// When set, simulate exactly this long (or until the route ends) and
  /// never time out. When unset, run to the end of the route.
  std::optional<double> duration;
  /// Safety cap for open-ended runs; exceeding it raises SimTimeoutError.
  double max_time = 1800.0;
  /// Dwell time at a stop before it is considered cleared.
  double stop_dwell = 2.0;
  /// Velocities at or below this count as "stopped" at a stop point.
  double v_stop_eps = 0.5;
  /// Lag between the displayed advisory and the value the driver reacts to.
  double perception_delay = 0.0;
};

/// Exponentially correlated acceleration disturbance (Ornstein-Uhlenbeck),
/// used to perturb the deterministic model into a human-like driver.
struct AccelNoise {
  double sigma = 0.0;  // stationary std, m/s^2
  double tau = 3.0;    // correlation time, s
  Rng* rng = nullptr;
};

struct SimOutcome {
  bool reached_route_end = false;
  bool advisory_exhausted = false;
  double end_time = 0.0;
};

/// Simulation aborted after opts.max_time without reaching the route end.
/// Carries whatever was integrated so far.
class SimTimeoutError : public std::runtime_error {
 public:
  SimTimeoutError(std::string msg, DriveTrace partial)
      : std::runtime_error(std::move(msg)), partial_trace(std::move(partial)) {}
  DriveTrace partial_trace;
};

namespace edm_detail {

struct Deriv {
  double dv = 0.0;
  double ds = 0.0;
};

/// One forward-integration step context: reference speed held fixed for
/// profile sources, stop distance re-evaluated at substep positions.
struct StepEnv {
  const EdmParams* params;
  const RouteMap* route;
  bool live_limit;                 // query the limit at substep positions
  double v_r_frozen;               // profile value for this step
  bool stop_armed;                 // an active, uncleared stop lies ahead
  double stop_position;
  double noise_accel;              // OU disturbance, constant over the step

  Deriv operator()(double v, double s) const {
    const double v_eval = std::max(v, 0.0);
    const double s_query =
        std::clamp(s, 0.0, route->total_length());
    const double v_r =
        live_limit ? route->speed_limit_at(s_query) : v_r_frozen;
    std::optional<double> dist;
    if (stop_armed) dist = std::max(stop_position - s, 0.0);
    EdmState st{v_eval, s, 0.0};
    double dv = edm_derivative(*params, st, v_r, dist) + noise_accel;
    if (v_eval <= 0.0 && dv < 0.0) dv = 0.0;  // no reverse driving
    return Deriv{dv, v_eval};
  }
};

inline void rk4_step(const StepEnv& env, double dt, double& v, double& s) {
  const Deriv k1 = env(v, s);
  const Deriv k2 = env(v + 0.5 * dt * k1.dv, s + 0.5 * dt * k1.ds);
  const Deriv k3 = env(v + 0.5 * dt * k2.dv, s + 0.5 * dt * k2.ds);
  const Deriv k4 = env(v + dt * k3.dv, s + dt * k3.ds);
  const double v_new =
      v + dt / 6.0 * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv);
  const double s_new =
      s + dt / 6.0 * (k1.ds + 2.0 * k2.ds + 2.0 * k3.ds + k4.ds);
  v = std::max(v_new, 0.0);
  s = std::max(s_new, s);  // position never decreases
}

}  // namespace edm_detail

/// Forward-integrates the driver model over the route with fixed step dt
/// (4th-order single-step method) and records one sample per step.
///
/// Stop handling: while an uncleared stop demands stopping, the vehicle is
/// held a small gap short of the line; once slowed to opts.v_stop_eps it
/// creeps across at that speed for at least opts.stop_dwell seconds before
/// the stop is cleared. A signalized stop whose light turns Green releases
/// the vehicle immediately.
inline DriveTrace simulate_edm(const EdmParams& params, const RouteMap& route,
                               const VrSource& vr, double dt,
                               const SimOptions& opts = {},
                               const AccelNoise& noise = {},
                               SimOutcome* outcome = nullptr) {
  using namespace edm_detail;
  params.validate();
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw std::invalid_argument("dt must be positive");
  if (!(route.total_length() > 0.0))
    throw std::invalid_argument("route has zero length");
  if (vr.kind == VrSource::Kind::Profile &&
      (vr.profile == nullptr || vr.profile->v.empty()))
    throw std::invalid_argument("profile source requires a non-empty profile");
  if (opts.duration && *opts.duration < 0.0)
    throw std::invalid_argument("duration must be non-negative");

  const double total = route.total_length();
  const bool live_limit = (vr.kind == VrSource::Kind::SpeedLimit);
  const bool noisy = noise.sigma > 0.0 && noise.rng != nullptr;
  const double noise_decay = noisy ? std::exp(-dt / noise.tau) : 0.0;
  const double noise_scale =
      noisy ? noise.sigma * std::sqrt(1.0 - noise_decay * noise_decay) : 0.0;

  DriveTrace trace;
  trace.dt = dt;
  SimOutcome result;

  double v = std::max(opts.v0, 0.0);
  double s = 0.0;
  double eta = 0.0;  // OU acceleration disturbance
  std::size_t next_stop_idx = 0;
  bool dwelling = false;
  double dwell_elapsed = 0.0;
  double dwell_speed = 0.0;

  const auto& stops = route.stops();
  std::vector<double> velocities;  // accumulated; features assembled at end
  std::vector<double> positions;
  std::vector<double> times;

  for (std::size_t step = 0;; ++step) {
    const double t = static_cast<double>(step) * dt;
    times.push_back(t);
    positions.push_back(s);
    velocities.push_back(v);

    if (opts.duration) {
      if (t + dt > *opts.duration + 1e-9) break;
      if (s >= total) {
        result.reached_route_end = true;
        break;
      }
    } else {
      if (s >= total) {
        result.reached_route_end = true;
        break;
      }
      if (t > opts.max_time) {
        // assemble the partial trace before bailing out
        break;
      }
    }

    // advisory lookup, zero-order hold over the step
    double v_r_frozen = 0.0;
    if (!live_limit) {
      const double t_seen = std::max(t - opts.perception_delay, 0.0);
      v_r_frozen = vr.profile->value_at(t_seen);
      if (vr.profile->exhausted_at(t_seen)) result.advisory_exhausted = true;
    }

    if (dwelling) {
      const StopPoint& at = stops[next_stop_idx];
      if (!route.stop_active(next_stop_idx, t)) {
        // light released the vehicle; the stop no longer binds
        dwelling = false;
        ++next_stop_idx;
      } else if (at.kind == StopKind::SignalizedStop) {
        // held at the line until the signal changes
        if (noisy) eta = noise_decay * eta + noise_scale * noise.rng->normal();
        continue;
      } else {
        v = dwell_speed;
        s += v * dt;
        dwell_elapsed += dt;
        if (dwell_elapsed + 1e-9 >= opts.stop_dwell && s >= at.position) {
          dwelling = false;
          ++next_stop_idx;
        }
        if (noisy) eta = noise_decay * eta + noise_scale * noise.rng->normal();
        continue;
      }
    }

    // clear any stops already passed (possible after a green light)
    while (next_stop_idx < stops.size() &&
           s > stops[next_stop_idx].position + pass_eps)
      ++next_stop_idx;

    const bool have_stop = next_stop_idx < stops.size();
    const double stop_pos = have_stop ? stops[next_stop_idx].position : 0.0;
    const bool signalized =
        have_stop && stops[next_stop_idx].kind == StopKind::SignalizedStop;
    const bool active = have_stop && s <= stop_pos &&
                        route.stop_active(next_stop_idx, t);

    StepEnv env{&params, &route, live_limit, v_r_frozen,
                active,  stop_pos, eta};
    rk4_step(env, dt, v, s);
    if (!std::isfinite(v) || !std::isfinite(s))
      throw std::runtime_error("simulation produced a non-finite state");

    if (active) {
      // hold the vehicle short of the line until it has slowed down
      const double barrier = stop_pos - stop_dist_floor;
      if (s > barrier) s = std::max(std::min(s, barrier), positions.back());
      if (stop_pos - s <= stop_dist_floor + 1e-9 && v <= opts.v_stop_eps) {
        dwelling = true;
        dwell_elapsed = 0.0;
        if (signalized) {
          v = 0.0;
        } else {
          dwell_speed = std::clamp(v, creep_min, opts.v_stop_eps);
          v = dwell_speed;
        }
      } else if (v < creep_min) {
        // braking scales with v^4, so the approach can numerically park the
        // vehicle short of the line; keep it rolling up to the barrier
        v = creep_min;
      }
    }

    if (noisy) eta = noise_decay * eta + noise_scale * noise.rng->normal();
  }

  const std::size_t n = times.size();
  result.end_time = times.back();
  const bool timed_out = !opts.duration && !result.reached_route_end &&
                         times.back() > opts.max_time;

  // Assemble features. Recorded acceleration is the realized per-step
  // velocity change, which keeps v[i+1] == v[i] + acc[i]*dt exact.
  for (std::size_t i = 0; i < n; ++i) {
    FeatureVector f;
    f.v = velocities[i];
    f.acc = i + 1 < n ? (velocities[i + 1] - velocities[i]) / dt
                      : (n >= 2 ? (velocities[i] - velocities[i - 1]) / dt
                                : 0.0);
    const double s_query = std::clamp(positions[i], 0.0, total);
    const PhaseQuery q = route.light_query(s_query, times[i]);
    f.d_tl = q.distance_to_light;
    f.tau_sp = q.phase_code;
    f.v_ref = live_limit ? route.speed_limit_at(s_query)
                         : vr.profile->value_at(times[i]);
    f.err = f.v_ref - f.v;
    trace.push(times[i], positions[i], f);
  }

  if (outcome) *outcome = result;
  if (timed_out)
    throw SimTimeoutError("simulation exceeded max_time without finishing route",
                          std::move(trace));
  return trace;
}

/// One advisory profile per calibration, each tracking the posted limits
/// over the route.
inline std::vector<ReferenceProfile> generate_reference(
    const std::vector<EdmParams>& calibrations, const RouteMap& route,
    double dt, const SimOptions& opts = {}) {
  if (calibrations.empty())
    throw std::invalid_argument("need at least one calibration");
  std::vector<ReferenceProfile> profiles;
  profiles.reserve(calibrations.size());
  for (const auto& params : calibrations) {
    DriveTrace trace =
        simulate_edm(params, route, VrSource::speed_limit(), dt, opts);
    ReferenceProfile profile;
    profile.dt = dt;
    profile.v = trace.v;
    profiles.push_back(std::move(profile));
  }
  return profiles;
}

}  // namespace advisim

#endif  // ADVISIM_EDM_HPP

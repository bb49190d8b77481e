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

#ifndef ADVISIM_SCENARIO_HPP
#define ADVISIM_SCENARIO_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "advisim/common.hpp"

namespace advisim {

enum class StopKind { StopSign, SignalizedStop };

struct StopPoint {
  double position = 0.0;  // m from route start
  StopKind kind = StopKind::StopSign;
};

enum class SignalPhase { Green, Yellow, Red };

/// Phase codes are ordinal in braking urgency and already live in [0, 1],
/// so feature normalization leaves them unchanged.
inline double phase_code(SignalPhase p) {
  switch (p) {
    case SignalPhase::Green:
      return 0.0;
    case SignalPhase::Yellow:
      return 0.5;
    case SignalPhase::Red:
      return 1.0;
  }
  return 0.0;
}

struct PhaseInterval {
  SignalPhase phase = SignalPhase::Green;
  double duration = 0.0;  // s
};

struct TrafficLight {
  double position = 0.0;  // m
  std::vector<PhaseInterval> cycle;
  double cycle_offset = 0.0;  // s, added to t before the cycle lookup

  double cycle_total() const {
    double total = 0.0;
    for (const auto& p : cycle) total += p.duration;
    return total;
  }

  /// Phase at absolute time t. The schedule repeats with period
  /// cycle_total(); the interval list starts at t = -cycle_offset.
  SignalPhase phase_at(double t) const {
    const double total = cycle_total();
    double local = std::fmod(t + cycle_offset, total);
    if (local < 0.0) local += total;
    for (const auto& p : cycle) {
      if (local < p.duration) return p.phase;
      local -= p.duration;
    }
    return cycle.back().phase;  // only reachable through rounding at the seam
  }
};

/// Distance to the nearest downstream signal and its phase code. When no
/// light is downstream the distance falls back to the remaining route
/// length with a Green code, keeping the pair bounded and normalizable.
struct PhaseQuery {
  double distance_to_light = 0.0;  // m
  double phase_code = 0.0;         // {0, 0.5, 1}
};

struct LimitZone {
  double start = 0.0;  // m, zone applies from here to the next zone start
  double limit = 0.0;  // m/s
};

/// Straight route with piecewise-constant speed limits, mandatory stops and
/// signalized intersections. Immutable after construction; all queries are
/// read-only and safe for concurrent readers.
class RouteMap {
 public:
  RouteMap(double total_length, std::vector<LimitZone> zones,
           std::vector<StopPoint> stops = {},
           std::vector<TrafficLight> lights = {})
      : total_length_(total_length),
        zones_(std::move(zones)),
        stops_(std::move(stops)),
        lights_(std::move(lights)) {
    validate();
    associate_signals();
  }

  double total_length() const { return total_length_; }
  const std::vector<LimitZone>& zones() const { return zones_; }
  const std::vector<StopPoint>& stops() const { return stops_; }
  const std::vector<TrafficLight>& lights() const { return lights_; }

  /// Limit of the zone whose start is the greatest one <= s. Zone starts
  /// are inclusive: the new limit applies exactly at the transition point.
  double speed_limit_at(double s) const {
    check_position(s);
    auto it = std::upper_bound(
        zones_.begin(), zones_.end(), s,
        [](double value, const LimitZone& z) { return value < z.start; });
    return std::prev(it)->limit;
  }

  double max_speed_limit() const {
    double m = 0.0;
    for (const auto& z : zones_) m = std::max(m, z.limit);
    return m;
  }

  /// Nearest stop at position >= s that demands stopping at time t. Stop
  /// signs always demand a stop; a signalized stop only while its light
  /// shows Red or Yellow. A vehicle exactly at a stop (distance 0) still
  /// sees it as downstream.
  std::optional<StopPoint> next_stop(double s, double t) const {
    check_position(s);
    for (std::size_t i = 0; i < stops_.size(); ++i) {
      if (stops_[i].position < s) continue;
      if (stop_active(i, t)) return stops_[i];
    }
    return std::nullopt;
  }

  PhaseQuery light_query(double s, double t) const {
    check_position(s);
    for (const auto& light : lights_) {
      if (light.position < s) continue;
      return PhaseQuery{light.position - s, phase_code(light.phase_at(t))};
    }
    return PhaseQuery{total_length_ - s, phase_code(SignalPhase::Green)};
  }

  /// Whether the stop at index i requires stopping at time t.
  bool stop_active(std::size_t i, double t) const {
    const StopPoint& stop = stops_[i];
    if (stop.kind == StopKind::StopSign) return true;
    const TrafficLight& light = lights_[signal_of_stop_[i]];
    return light.phase_at(t) != SignalPhase::Green;
  }

 private:
  // Signalized stops must sit on a light; positions may differ by at most
  // this much (m).
  static constexpr double signal_match_tol = 1.0;

  void check_position(double s) const {
    if (!(s >= 0.0 && s <= total_length_)) {
      throw std::out_of_range("route position " + std::to_string(s) +
                              " outside [0, " + std::to_string(total_length_) +
                              "]");
    }
  }

  void validate() const {
    if (!(total_length_ > 0.0) || !std::isfinite(total_length_))
      throw std::invalid_argument("route total_length must be positive");
    if (zones_.empty() || zones_.front().start != 0.0)
      throw std::invalid_argument("first limit zone must start at 0");
    for (std::size_t i = 0; i < zones_.size(); ++i) {
      if (!(zones_[i].limit > 0.0) || !std::isfinite(zones_[i].limit))
        throw std::invalid_argument("speed limits must be positive");
      if (i > 0 && !(zones_[i].start > zones_[i - 1].start))
        throw std::invalid_argument("zone starts must be strictly increasing");
      if (zones_[i].start > total_length_)
        throw std::invalid_argument("zone start beyond route end");
    }
    auto check_on_route = [this](double pos, const char* what) {
      if (!std::isfinite(pos) || pos < 0.0 || pos > total_length_)
        throw std::invalid_argument(std::string(what) +
                                    " position outside route");
    };
    for (std::size_t i = 0; i < stops_.size(); ++i) {
      check_on_route(stops_[i].position, "stop");
      if (i > 0 && !(stops_[i].position > stops_[i - 1].position))
        throw std::invalid_argument("stop positions must be strictly increasing");
    }
    for (std::size_t i = 0; i < lights_.size(); ++i) {
      check_on_route(lights_[i].position, "light");
      if (i > 0 && !(lights_[i].position > lights_[i - 1].position))
        throw std::invalid_argument(
            "light positions must be strictly increasing");
      if (lights_[i].cycle.empty())
        throw std::invalid_argument("light cycle must be non-empty");
      for (const auto& p : lights_[i].cycle)
        if (!(p.duration > 0.0) || !std::isfinite(p.duration))
          throw std::invalid_argument("phase durations must be positive");
    }
  }

  void associate_signals() {
    signal_of_stop_.assign(stops_.size(), 0);
    for (std::size_t i = 0; i < stops_.size(); ++i) {
      if (stops_[i].kind != StopKind::SignalizedStop) continue;
      bool found = false;
      for (std::size_t j = 0; j < lights_.size(); ++j) {
        if (std::abs(lights_[j].position - stops_[i].position) <=
            signal_match_tol) {
          signal_of_stop_[i] = j;
          found = true;
          break;
        }
      }
      if (!found)
        throw std::invalid_argument(
            "signalized stop at " + std::to_string(stops_[i].position) +
            " has no traffic light within " +
            std::to_string(signal_match_tol) + " m");
    }
  }

  double total_length_;
  std::vector<LimitZone> zones_;
  std::vector<StopPoint> stops_;
  std::vector<TrafficLight> lights_;
  std::vector<std::size_t> signal_of_stop_;
};

namespace scenario_detail {

inline constexpr double kDefaultRouteLength = 8047.0;  // 5 miles

inline std::vector<LimitZone> default_zones() {
  const double mph25 = 11.18, mph35 = 15.65, mph50 = 22.35;
  return {{0.0, mph25},    {800.0, mph35},  {1800.0, mph50}, {3200.0, mph35},
          {4200.0, mph25}, {5200.0, mph50}, {7000.0, mph35}};
}

inline double default_stop_position(int i) {
  return std::round(kDefaultRouteLength * i / 6.0 * 10.0) / 10.0;
}

}  // namespace scenario_detail

/// Built-in 5-mile route: alternating 25/35/50 mph bands (stored in m/s)
/// and five evenly spaced stop signs, no signals.
inline RouteMap make_default_route() {
  std::vector<StopPoint> stops;
  for (int i = 1; i <= 5; ++i)
    stops.push_back(
        {scenario_detail::default_stop_position(i), StopKind::StopSign});
  return RouteMap(scenario_detail::kDefaultRouteLength,
                  scenario_detail::default_zones(), std::move(stops));
}

/// Signalized variant of the built-in route: same bands and spacing, with
/// the five stops run as fixed 60 s cycle traffic lights. Cycle offsets
/// stagger the lights so arrivals cover the whole cycle.
inline RouteMap make_signalized_route() {
  const std::vector<PhaseInterval> cycle = {{SignalPhase::Green, 30.0},
                                            {SignalPhase::Yellow, 5.0},
                                            {SignalPhase::Red, 25.0}};
  std::vector<StopPoint> stops;
  std::vector<TrafficLight> lights;
  for (int i = 1; i <= 5; ++i) {
    const double pos = scenario_detail::default_stop_position(i);
    stops.push_back({pos, StopKind::SignalizedStop});
    lights.push_back({pos, cycle, 12.0 * static_cast<double>(i - 1)});
  }
  return RouteMap(scenario_detail::kDefaultRouteLength,
                  scenario_detail::default_zones(), std::move(stops),
                  std::move(lights));
}

}  // namespace advisim

#endif  // ADVISIM_SCENARIO_HPP

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

#ifndef ADVISIM_TRACE_HPP
#define ADVISIM_TRACE_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "advisim/common.hpp"

namespace advisim {

/// The six observed channels recorded at every sample. Order is fixed and
/// shared by trace files, window matrices and the network input layer.
struct FeatureVector {
  double v = 0.0;       // vehicle velocity, m/s
  double acc = 0.0;     // longitudinal acceleration, m/s^2
  double d_tl = 0.0;    // distance to next traffic light (or remaining route), m
  double v_ref = 0.0;   // displayed advisory speed, m/s
  double tau_sp = 0.0;  // signal phase code, {0, 0.5, 1}
  double err = 0.0;     // advisory tracking error v_ref - v, m/s
};

enum class Channel : int { V = 0, Acc = 1, DTl = 2, VRef = 3, TauSp = 4, Err = 5 };

inline constexpr int kNumChannels = 6;

inline const char* channel_name(Channel c) {
  switch (c) {
    case Channel::V: return "v";
    case Channel::Acc: return "acc";
    case Channel::DTl: return "d_tl";
    case Channel::VRef: return "v_ref";
    case Channel::TauSp: return "tau_sp";
    case Channel::Err: return "err";
  }
  return "?";
}

/// Uniformly sampled drive recording: position plus the six feature
/// channels, stored column-wise.
struct DriveTrace {
  std::string driver_id;
  double dt = 0.0;
  std::vector<double> t;
  std::vector<double> s;
  std::vector<double> v;
  std::vector<double> acc;
  std::vector<double> d_tl;
  std::vector<double> v_ref;
  std::vector<double> tau_sp;
  std::vector<double> err;

  std::size_t size() const { return t.size(); }
  bool empty() const { return t.empty(); }
  double duration() const { return t.empty() ? 0.0 : t.back(); }

  FeatureVector feature(std::size_t i) const {
    return FeatureVector{v[i], acc[i], d_tl[i], v_ref[i], tau_sp[i], err[i]};
  }

  const std::vector<double>& channel(Channel c) const {
    switch (c) {
      case Channel::V: return v;
      case Channel::Acc: return acc;
      case Channel::DTl: return d_tl;
      case Channel::VRef: return v_ref;
      case Channel::TauSp: return tau_sp;
      case Channel::Err: return err;
    }
    return v;
  }

  void push(double time, double pos, const FeatureVector& f) {
    t.push_back(time);
    s.push_back(pos);
    v.push_back(f.v);
    acc.push_back(f.acc);
    d_tl.push_back(f.d_tl);
    v_ref.push_back(f.v_ref);
    tau_sp.push_back(f.tau_sp);
    err.push_back(f.err);
  }
};

/// Advisory speed profile sampled every dt seconds starting at t = 0.
/// Lookups hold each sample until the next one and hold the last value
/// past the end of the profile.
struct ReferenceProfile {
  double dt = 0.0;
  std::vector<double> v;

  std::size_t size() const { return v.size(); }
  double duration() const {
    return v.empty() ? 0.0 : dt * static_cast<double>(v.size() - 1);
  }

  double value_at(double time) const {
    if (v.empty()) throw std::domain_error("empty reference profile");
    if (time <= 0.0) return v.front();
    auto idx = static_cast<std::size_t>(std::floor(time / dt + 1e-9));
    if (idx >= v.size()) idx = v.size() - 1;
    return v[idx];
  }

  bool exhausted_at(double time) const {
    return !v.empty() && time > duration() + 1e-9;
  }
};

}  // namespace advisim

#endif  // ADVISIM_TRACE_HPP

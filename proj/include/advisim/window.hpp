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

#ifndef ADVISIM_WINDOW_HPP
#define ADVISIM_WINDOW_HPP

#include <Eigen/Core>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "advisim/common.hpp"
#include "advisim/trace.hpp"

namespace advisim {

/// History/prediction window geometry. n_h and n_p are the spans in
/// samples; keep them consistent with the time spans via make().
struct WindowConfig {
  double t_h = 30.0;  // history span, s
  double t_p = 5.0;   // prediction span, s
  double dt = 0.1;    // s
  int n_h = 300;
  int n_p = 50;

  static WindowConfig make(double t_h, double t_p, double dt) {
    WindowConfig cfg;
    cfg.t_h = t_h;
    cfg.t_p = t_p;
    cfg.dt = dt;
    if (!(dt > 0.0) || !(t_h > 0.0) || !(t_p > 0.0))
      throw ConfigError("window spans and dt must be positive");
    cfg.n_h = static_cast<int>(std::lround(t_h / dt));
    cfg.n_p = static_cast<int>(std::lround(t_p / dt));
    cfg.validate();
    return cfg;
  }

  void validate() const {
    if (!(dt > 0.0)) throw ConfigError("window dt must be positive");
    if (n_h < 1 || n_p < 1) throw ConfigError("window spans too short");
    if (n_h != std::lround(t_h / dt) || n_p != std::lround(t_p / dt))
      throw ConfigError("window point counts inconsistent with spans");
  }

  int span() const { return n_h + n_p; }
};

/// Per-channel (min, max) used to map features onto [0, 1]. The two
/// predicted quantities reuse the v and err channel statistics so that
/// predictions fed back as inputs stay on the input scale.
class NormStats {
 public:
  NormStats() {
    lo_.fill(0.0);
    hi_.fill(1.0);
  }

  NormStats(const std::array<double, kNumChannels>& lo,
            const std::array<double, kNumChannels>& hi)
      : lo_(lo), hi_(hi) {
    for (int c = 0; c < kNumChannels; ++c) {
      if (!std::isfinite(lo_[c]) || !std::isfinite(hi_[c]) ||
          !(hi_[c] > lo_[c]))
        throw ConfigError(std::string("degenerate normalization channel ") +
                          channel_name(static_cast<Channel>(c)));
    }
  }

  double lo(Channel c) const { return lo_[static_cast<int>(c)]; }
  double hi(Channel c) const { return hi_[static_cast<int>(c)]; }

  /// (x - min)/(max - min), clamped so out-of-range inputs from held-out
  /// data stay in [0, 1].
  double normalize(double x, Channel c) const {
    const int i = static_cast<int>(c);
    return std::clamp((x - lo_[i]) / (hi_[i] - lo_[i]), 0.0, 1.0);
  }

  double denormalize(double y, Channel c) const {
    const int i = static_cast<int>(c);
    return lo_[i] + y * (hi_[i] - lo_[i]);
  }

 private:
  std::array<double, kNumChannels> lo_;
  std::array<double, kNumChannels> hi_;
};

/// One training sample: n_h history columns of all six channels and the
/// n_p future columns of the two predicted channels, normalized.
struct WindowSample {
  Eigen::MatrixXd x;  // 6 x n_h
  Eigen::MatrixXd y;  // 2 x n_p
  const std::string* driver_id = nullptr;
  std::size_t start = 0;
};

/// Sliding windows over a set of traces, stored as one normalized channel
/// matrix per trace and materialized per sample on demand (the expanded
/// window set would not fit in memory for realistic fleets).
class WindowedDataset {
 public:
  WindowedDataset() = default;

  WindowedDataset(WindowConfig cfg, NormStats norm) : cfg_(cfg), norm_(norm) {}

  const WindowConfig& config() const { return cfg_; }
  const NormStats& norm() const { return norm_; }
  std::size_t size() const { return index_.size(); }
  bool empty() const { return index_.empty(); }
  std::size_t trace_count() const { return traces_.size(); }
  const std::vector<std::string>& driver_ids() const { return ids_; }

  void add_trace(const DriveTrace& trace) {
    const auto len = static_cast<Eigen::Index>(trace.size());
    if (len < cfg_.span())
      throw ConfigError("trace shorter than one window");
    Eigen::MatrixXd m(kNumChannels, len);
    for (int c = 0; c < kNumChannels; ++c) {
      const auto& raw = trace.channel(static_cast<Channel>(c));
      for (Eigen::Index i = 0; i < len; ++i)
        m(c, i) = norm_.normalize(raw[static_cast<std::size_t>(i)],
                                  static_cast<Channel>(c));
    }
    const std::size_t trace_idx = traces_.size();
    traces_.push_back(std::move(m));
    ids_.push_back(trace.driver_id);
    const std::size_t count =
        static_cast<std::size_t>(len) - static_cast<std::size_t>(cfg_.span()) +
        1;
    for (std::size_t s = 0; s < count; ++s) index_.push_back({trace_idx, s});
  }

  WindowSample sample(std::size_t i) const {
    const Ref& ref = index_.at(i);
    const Eigen::MatrixXd& m = traces_[ref.trace];
    const auto start = static_cast<Eigen::Index>(ref.start);
    WindowSample out;
    out.x = m.block(0, start, kNumChannels, cfg_.n_h);
    out.y.resize(2, cfg_.n_p);
    out.y.row(0) = m.block(static_cast<int>(Channel::V), start + cfg_.n_h, 1,
                           cfg_.n_p);
    out.y.row(1) = m.block(static_cast<int>(Channel::Err), start + cfg_.n_h, 1,
                           cfg_.n_p);
    out.driver_id = &ids_[ref.trace];
    out.start = ref.start;
    return out;
  }

 private:
  struct Ref {
    std::size_t trace;
    std::size_t start;
  };

  WindowConfig cfg_;
  NormStats norm_;
  std::vector<Eigen::MatrixXd> traces_;
  std::vector<std::string> ids_;
  std::vector<Ref> index_;
};

namespace window_detail {

/// Channel extrema over whole traces. Every sample of a trace is covered
/// by at least one window, so trace extrema equal window extrema.
inline NormStats stats_from_traces(
    const std::vector<const DriveTrace*>& traces) {
  std::array<double, kNumChannels> lo;
  std::array<double, kNumChannels> hi;
  lo.fill(std::numeric_limits<double>::infinity());
  hi.fill(-std::numeric_limits<double>::infinity());
  for (const DriveTrace* trace : traces) {
    for (int c = 0; c < kNumChannels; ++c) {
      for (double x : trace->channel(static_cast<Channel>(c))) {
        lo[c] = std::min(lo[c], x);
        hi[c] = std::max(hi[c], x);
      }
    }
  }
  // The signal-phase code is {0, 0.5, 1} by construction. Routes without
  // signals would make it degenerate, so its range is pinned rather than
  // measured and normalization on it is the identity.
  const int phase = static_cast<int>(Channel::TauSp);
  lo[phase] = 0.0;
  hi[phase] = 1.0;
  return NormStats(lo, hi);
}

}  // namespace window_detail

/// Splits traces into train/test by whole drivers (n_test held out, chosen
/// by seeded shuffle), normalizes with statistics from the training split
/// only, and produces stride-1 sliding windows for both splits. Traces
/// shorter than one window are skipped and reported through `skipped`.
inline std::pair<WindowedDataset, WindowedDataset> window_dataset(
    const std::vector<DriveTrace>& traces, const WindowConfig& cfg,
    std::uint64_t split_seed, std::size_t n_test,
    std::vector<std::string>* skipped = nullptr) {
  cfg.validate();
  std::vector<const DriveTrace*> eligible;
  for (const auto& trace : traces) {
    if (static_cast<int>(trace.size()) >= cfg.span()) {
      eligible.push_back(&trace);
    } else if (skipped) {
      skipped->push_back(trace.driver_id);
    }
  }
  if (eligible.empty())
    throw ConfigError("no trace is long enough for one window");
  if (n_test >= eligible.size())
    throw ConfigError("n_test must leave at least one training trace");

  // Fisher-Yates with the derived stream so the split is seed-stable.
  std::vector<std::size_t> order(eligible.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(derive_seed(split_seed, 0x5717));
  for (std::size_t i = order.size(); i > 1; --i) {
    const std::size_t j = rng.uniform_index(i);
    std::swap(order[i - 1], order[j]);
  }

  std::vector<const DriveTrace*> test_traces;
  std::vector<const DriveTrace*> train_traces;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (k < n_test)
      test_traces.push_back(eligible[order[k]]);
    else
      train_traces.push_back(eligible[order[k]]);
  }

  const NormStats norm = window_detail::stats_from_traces(train_traces);
  WindowedDataset train(cfg, norm);
  WindowedDataset test(cfg, norm);
  for (const DriveTrace* t : train_traces) train.add_trace(*t);
  for (const DriveTrace* t : test_traces) test.add_trace(*t);
  return {std::move(train), std::move(test)};
}

}  // namespace advisim

#endif  // ADVISIM_WINDOW_HPP

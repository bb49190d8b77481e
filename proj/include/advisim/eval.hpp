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

#ifndef ADVISIM_EVAL_HPP
#define ADVISIM_EVAL_HPP

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "advisim/common.hpp"
#include "advisim/edm.hpp"
#include "advisim/scenario.hpp"
#include "advisim/seqnet.hpp"
#include "advisim/trace.hpp"
#include "advisim/window.hpp"

namespace advisim {

/// Root mean squared difference between two equal-length series.
inline double rmse(const std::vector<double>& y,
                   const std::vector<double>& y_hat) {
  if (y.empty()) throw std::invalid_argument("rmse: empty series");
  if (y.size() != y_hat.size())
    throw std::invalid_argument("rmse: length mismatch");
  double sq = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double d = y[i] - y_hat[i];
    sq += d * d;
  }
  return std::sqrt(sq / static_cast<double>(y.size()));
}

/// Per-driver prediction quality on the two scored channels.
struct DriverScore {
  std::string driver_id;
  double rmse_v = 0.0;
  double rmse_err = 0.0;
  std::size_t points = 0;  // pooled predictions per channel
};

/// All predicted values for one driver, for distribution reports.
struct PooledSeries {
  std::vector<double> v;
  std::vector<double> err;
};

struct ComparisonRow {
  std::string driver_id;
  double rmse_v_lstm = 0.0;
  double rmse_v_edm = 0.0;
  double rmse_err_lstm = 0.0;
  double rmse_err_edm = 0.0;
};

enum class DistChannel { Velocity, TrackingError };
enum class DistSource { Actual, Lstm, Edm };

inline const char* dist_channel_name(DistChannel c) {
  return c == DistChannel::Velocity ? "velocity" : "tracking_error";
}

inline const char* dist_source_name(DistSource s) {
  switch (s) {
    case DistSource::Actual:
      return "actual";
    case DistSource::Lstm:
      return "lstm";
    default:
      return "edm";
  }
}

struct DistSummary {
  DistChannel channel = DistChannel::Velocity;
  DistSource source = DistSource::Actual;
  double mean = 0.0;
  double stddev = 0.0;  // population convention
  double lo = 0.0;
  double hi = 0.0;
  std::vector<std::size_t> counts;
};

// Default histogram layout for report files.
inline constexpr int kDistBins = 30;
inline constexpr double kVelDistLo = 0.0;
inline constexpr double kVelDistHi = 30.0;
inline constexpr double kErrDistLo = -10.0;
inline constexpr double kErrDistHi = 10.0;

/// Mean, population standard deviation and a fixed-edge histogram.
/// Out-of-range values land in the nearest end bin; a value exactly at
/// the upper edge counts toward the last bin.
inline DistSummary dist_summary(const std::vector<double>& series, int bins,
                                double lo, double hi) {
  if (series.empty()) throw std::invalid_argument("dist_summary: empty series");
  if (bins < 1) throw std::invalid_argument("dist_summary: bins must be >= 1");
  if (!(hi > lo)) throw std::invalid_argument("dist_summary: hi must exceed lo");

  DistSummary out;
  out.lo = lo;
  out.hi = hi;
  out.counts.assign(static_cast<std::size_t>(bins), 0);

  double sum = 0.0;
  for (double x : series) sum += x;
  out.mean = sum / static_cast<double>(series.size());

  double sq = 0.0;
  const double scale = static_cast<double>(bins) / (hi - lo);
  for (double x : series) {
    const double d = x - out.mean;
    sq += d * d;
    const auto bin = static_cast<long>(std::floor((x - lo) * scale));
    const long clipped =
        std::clamp(bin, 0L, static_cast<long>(bins) - 1L);
    ++out.counts[static_cast<std::size_t>(clipped)];
  }
  out.stddev = std::sqrt(sq / static_cast<double>(series.size()));
  return out;
}

namespace eval_detail {

/// Scores one trace by sliding a history window over it, asking the
/// predictor for the n_p-step future at every start and pooling all
/// squared errors into one RMSE per channel.
template <typename Predictor>
DriverScore score_trace_windows(const DriveTrace& trace,
                                const WindowConfig& cfg,
                                Predictor&& predictor) {
  const auto n_h = static_cast<std::size_t>(cfg.n_h);
  const auto n_p = static_cast<std::size_t>(cfg.n_p);
  if (trace.size() < n_h + n_p)
    throw std::invalid_argument("trace shorter than one window");
  const std::size_t starts = trace.size() - n_h - n_p + 1;

  Eigen::MatrixXd history(kNumChannels, cfg.n_h);
  double sq_v = 0.0;
  double sq_err = 0.0;
  for (std::size_t start = 0; start < starts; ++start) {
    for (std::size_t k = 0; k < n_h; ++k) {
      const FeatureVector f = trace.feature(start + k);
      const auto col = static_cast<Eigen::Index>(k);
      history(0, col) = f.v;
      history(1, col) = f.acc;
      history(2, col) = f.d_tl;
      history(3, col) = f.v_ref;
      history(4, col) = f.tau_sp;
      history(5, col) = f.err;
    }
    const auto [v_hat, err_hat] = predictor(history, start);
    if (v_hat.size() != n_p || err_hat.size() != n_p)
      throw std::runtime_error("predictor returned wrong horizon length");
    for (std::size_t k = 0; k < n_p; ++k) {
      const std::size_t i = start + n_h + k;
      const double dv = trace.v[i] - v_hat[k];
      const double derr = trace.err[i] - err_hat[k];
      sq_v += dv * dv;
      sq_err += derr * derr;
    }
  }

  DriverScore score;
  score.driver_id = trace.driver_id;
  score.points = starts * n_p;
  score.rmse_v = std::sqrt(sq_v / static_cast<double>(score.points));
  score.rmse_err = std::sqrt(sq_err / static_cast<double>(score.points));
  return score;
}

}  // namespace eval_detail

/// Sliding-window evaluation of the sequence model on held-out traces.
/// Traces shorter than one window are skipped and reported through
/// `skipped` when provided.
inline std::vector<DriverScore> evaluate_lstmed(
    const LstmEdModel& model, const NormStats& norm,
    const std::vector<DriveTrace>& traces, const WindowConfig& cfg,
    std::vector<std::string>* skipped = nullptr,
    std::vector<PooledSeries>* pooled = nullptr) {
  cfg.validate();
  if (model.config.n_h != cfg.n_h || model.config.n_p != cfg.n_p)
    throw ConfigError("model window lengths disagree with the evaluation");

  std::vector<const DriveTrace*> eligible;
  for (const DriveTrace& t : traces) {
    if (t.size() < static_cast<std::size_t>(cfg.span())) {
      if (skipped) skipped->push_back(t.driver_id);
      continue;
    }
    eligible.push_back(&t);
  }

  std::vector<DriverScore> scores(eligible.size());
  if (pooled) pooled->assign(eligible.size(), {});
  parallel_for(eligible.size(), [&](std::size_t i) {
    scores[i] = eval_detail::score_trace_windows(
        *eligible[i], cfg, [&](const Eigen::MatrixXd& history, std::size_t) {
          auto pred = predict(model, norm, history);
          if (pooled) {
            auto& sink = (*pooled)[i];
            sink.v.insert(sink.v.end(), pred.first.begin(), pred.first.end());
            sink.err.insert(sink.err.end(), pred.second.begin(),
                            pred.second.end());
          }
          return pred;
        });
  });
  return scores;
}

/// Replays the deterministic model against each trace's recorded advisory
/// and scores the velocity it produces. The model's tracking error is
/// v_ref - v_model and the actual error is v_ref - v_actual with the same
/// v_ref, so the error residual equals the velocity residual and one RMSE
/// serves both channels.
inline std::vector<DriverScore> evaluate_edm(
    const std::map<std::string, EdmParams>& calibrated,
    const std::vector<DriveTrace>& traces, const RouteMap& route,
    std::vector<PooledSeries>* pooled = nullptr) {
  std::vector<std::pair<const DriveTrace*, const EdmParams*>> jobs;
  for (const DriveTrace& t : traces) {
    if (t.empty()) throw std::invalid_argument("empty evaluation trace");
    const auto it = calibrated.find(t.driver_id);
    if (it == calibrated.end())
      throw std::invalid_argument("no calibration for driver " + t.driver_id);
    jobs.emplace_back(&t, &it->second);
  }

  std::vector<DriverScore> scores(jobs.size());
  if (pooled) pooled->assign(jobs.size(), {});
  parallel_for(jobs.size(), [&](std::size_t i) {
    const DriveTrace& target = *jobs[i].first;

    ReferenceProfile advisory;
    advisory.dt = target.dt;
    advisory.v = target.v_ref;
    SimOptions opts;
    opts.v0 = target.v.front();
    opts.duration = target.duration();
    const DriveTrace replay = simulate_edm(
        *jobs[i].second, route, VrSource::advisory(advisory), target.dt, opts);

    const std::size_t n = std::min(replay.size(), target.size());
    double sq = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double d = target.v[k] - replay.v[k];
      sq += d * d;
    }
    if (pooled) {
      auto& sink = (*pooled)[i];
      sink.v.assign(replay.v.begin(), replay.v.begin() +
                    static_cast<std::ptrdiff_t>(n));
      sink.err.resize(n);
      for (std::size_t k = 0; k < n; ++k)
        sink.err[k] = target.v_ref[k] - replay.v[k];
    }
    DriverScore s;
    s.driver_id = target.driver_id;
    s.points = n;
    s.rmse_v = std::sqrt(sq / static_cast<double>(n));
    s.rmse_err = s.rmse_v;
    scores[i] = s;
  });
  return scores;
}

/// Joins per-driver scores from both models; drivers must match one-to-one.
inline std::vector<ComparisonRow> make_comparison(
    const std::vector<DriverScore>& lstm,
    const std::vector<DriverScore>& edm) {
  if (lstm.size() != edm.size())
    throw std::invalid_argument("score lists differ in driver count");
  std::map<std::string, const DriverScore*> by_id;
  for (const DriverScore& s : edm) by_id[s.driver_id] = &s;
  std::vector<ComparisonRow> rows;
  for (const DriverScore& s : lstm) {
    const auto it = by_id.find(s.driver_id);
    if (it == by_id.end())
      throw std::invalid_argument("driver " + s.driver_id +
                                  " missing from one score list");
    rows.push_back({s.driver_id, s.rmse_v, it->second->rmse_v, s.rmse_err,
                    it->second->rmse_err});
  }
  return rows;
}

struct ComparisonReport {
  std::string text;  // aligned, 2-decimal
  std::string csv;   // full-precision
  int wins_v = 0;
  int ties_v = 0;
  int wins_err = 0;
  int ties_err = 0;
};

inline ComparisonReport comparison_table(
    const std::vector<ComparisonRow>& rows) {
  if (rows.empty()) throw std::invalid_argument("comparison needs >= 1 row");
  for (const ComparisonRow& r : rows) {
    for (double v :
         {r.rmse_v_lstm, r.rmse_v_edm, r.rmse_err_lstm, r.rmse_err_edm})
      if (!(std::isfinite(v) && v >= 0.0))
        throw std::invalid_argument("RMSE values must be finite and >= 0");
  }

  ComparisonReport rep;
  rep.text =
      "driver        rmse_v_lstm  rmse_v_edm  rmse_err_lstm  rmse_err_edm\n";
  rep.csv = "driver_id,rmse_v_lstm,rmse_v_edm,rmse_err_lstm,rmse_err_edm\n";
  char line[160];
  for (const ComparisonRow& r : rows) {
    std::snprintf(line, sizeof(line), "%-12s %12.2f %11.2f %14.2f %13.2f\n",
                  r.driver_id.c_str(), r.rmse_v_lstm, r.rmse_v_edm,
                  r.rmse_err_lstm, r.rmse_err_edm);
    rep.text += line;
    rep.csv += r.driver_id + ',' + shortest_double(r.rmse_v_lstm) + ',' +
               shortest_double(r.rmse_v_edm) + ',' +
               shortest_double(r.rmse_err_lstm) + ',' +
               shortest_double(r.rmse_err_edm) + '\n';

    if (r.rmse_v_lstm < r.rmse_v_edm)
      ++rep.wins_v;
    else if (r.rmse_v_lstm == r.rmse_v_edm)
      ++rep.ties_v;
    if (r.rmse_err_lstm < r.rmse_err_edm)
      ++rep.wins_err;
    else if (r.rmse_err_lstm == r.rmse_err_edm)
      ++rep.ties_err;
  }

  const auto n = static_cast<int>(rows.size());
  std::snprintf(line, sizeof(line),
                "lstmed beats edm on velocity for %d/%d drivers (%d ties), "
                "on error for %d/%d drivers (%d ties)\n",
                rep.wins_v, n, rep.ties_v, rep.wins_err, n, rep.ties_err);
  rep.text += line;
  return rep;
}

}  // namespace advisim

#endif  // ADVISIM_EVAL_HPP

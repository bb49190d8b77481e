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

#include "advisim/io.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <string>
#include <vector>

#include "advisim/common.hpp"
#include "advisim/scenario.hpp"
#include "advisim/seqnet.hpp"
#include "advisim/trace.hpp"
#include "advisim/window.hpp"

namespace advisim {
namespace {

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::path(::testing::TempDir()) / name;
}

DriveTrace awkward_trace(int n = 25) {
  DriveTrace tr;
  tr.driver_id = "d0";
  tr.dt = 0.1;
  Rng rng(321);
  for (int i = 0; i < n; ++i) {
    FeatureVector f;
    f.v = rng.uniform(0.0, 30.0);
    f.acc = rng.normal(0.0, 2.0);
    f.d_tl = rng.uniform(0.0, 8047.0);
    f.v_ref = 1.0 / 3.0 + i;
    f.tau_sp = (i % 2) ? 0.5 : 1.0;
    f.err = f.v_ref - f.v;
    tr.push(0.1 * i, 1.23456789012345 * i, f);
  }
  return tr;
}

TEST(ShortestDouble, RoundTripsExactly) {
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const double x = rng.normal(0.0, 1.0) * std::pow(10.0, rng.uniform(-12.0, 12.0));
    const std::string s = shortest_double(x);
    double back = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), back);
    ASSERT_EQ(res.ec, std::errc{});
    EXPECT_EQ(back, x) << s;
  }
  EXPECT_EQ(shortest_double(0.1), "0.1");
  EXPECT_EQ(shortest_double(-2.0), "-2");
}

TEST(TraceCsv, HeaderIsExact) {
  const std::string csv = trace_to_csv(awkward_trace(2));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,s,v,acc,d_tl,v_ref,tau_sp,err");
}

TEST(TraceCsv, RoundTripsBitExact) {
  const DriveTrace tr = awkward_trace();
  const DriveTrace back = trace_from_csv(trace_to_csv(tr), tr.driver_id);
  ASSERT_EQ(back.size(), tr.size());
  EXPECT_EQ(back.driver_id, "d0");
  EXPECT_DOUBLE_EQ(back.dt, tr.dt);
  for (std::size_t i = 0; i < tr.size(); ++i) {
    EXPECT_EQ(back.t[i], tr.t[i]);
    EXPECT_EQ(back.s[i], tr.s[i]);
    EXPECT_EQ(back.v[i], tr.v[i]);
    EXPECT_EQ(back.acc[i], tr.acc[i]);
    EXPECT_EQ(back.d_tl[i], tr.d_tl[i]);
    EXPECT_EQ(back.v_ref[i], tr.v_ref[i]);
    EXPECT_EQ(back.tau_sp[i], tr.tau_sp[i]);
    EXPECT_EQ(back.err[i], tr.err[i]);
  }
}

TEST(TraceCsv, FileRoundTripTakesIdFromFileName) {
  const auto path = temp_path("driver_042.csv");
  write_trace_csv(path, awkward_trace(5));
  const DriveTrace back = read_trace_csv(path);
  EXPECT_EQ(back.driver_id, "driver_042");
  EXPECT_EQ(back.size(), 5u);
}

TEST(TraceCsv, MalformedInputThrows) {
  EXPECT_THROW(trace_from_csv("v,t\n"), IoError);
  const std::string header = "t,s,v,acc,d_tl,v_ref,tau_sp,err\n";
  EXPECT_THROW(trace_from_csv(header + "1,2,3\n"), IoError);
  EXPECT_THROW(trace_from_csv(header + "1,2,3,4,5,6,7,8,9\n"), IoError);
  try {
    trace_from_csv(header + "0,0,0,0,0,0,0,0\n0.1,oops,0,0,0,0,0,0\n");
    FAIL() << "expected IoError";
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos)
        << e.what();
  }
}

TEST(TraceCsv, MissingFileNamesThePath) {
  try {
    read_trace_csv(temp_path("nope.csv"));
    FAIL() << "expected IoError";
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("nope.csv"), std::string::npos);
  }
}

TEST(ProfileCsv, RoundTrips) {
  ReferenceProfile p;
  p.dt = 0.2;
  for (int i = 0; i < 40; ++i) p.v.push_back(10.0 + 0.25 * i);
  const ReferenceProfile back = profile_from_csv(profile_to_csv(p));
  ASSERT_EQ(back.v.size(), p.v.size());
  EXPECT_DOUBLE_EQ(back.dt, p.dt);
  for (std::size_t i = 0; i < p.v.size(); ++i) EXPECT_EQ(back.v[i], p.v[i]);
  EXPECT_THROW(profile_from_csv("x,y\n"), IoError);
}

TEST(RouteJson, RoundTripPreservesGeometry) {
  const RouteMap route = make_default_route();
  const RouteMap back = route_from_json(route_to_json(route));

  EXPECT_DOUBLE_EQ(back.total_length(), route.total_length());
  ASSERT_EQ(back.zones().size(), route.zones().size());
  for (std::size_t i = 0; i < route.zones().size(); ++i) {
    EXPECT_EQ(back.zones()[i].start, route.zones()[i].start);
    EXPECT_EQ(back.zones()[i].limit, route.zones()[i].limit);
  }
  ASSERT_EQ(back.stops().size(), route.stops().size());
  for (std::size_t i = 0; i < route.stops().size(); ++i) {
    EXPECT_EQ(back.stops()[i].position, route.stops()[i].position);
    EXPECT_EQ(back.stops()[i].kind, route.stops()[i].kind);
  }
}

TEST(RouteJson, RoundTripPreservesSignals) {
  TrafficLight light;
  light.position = 400.0;
  light.cycle = {{SignalPhase::Green, 30.0},
                 {SignalPhase::Yellow, 5.0},
                 {SignalPhase::Red, 25.0}};
  light.cycle_offset = 12.5;
  const RouteMap route(1000.0, {{0.0, 20.0}},
                       {{400.0, StopKind::SignalizedStop}}, {light});

  const RouteMap back = route_from_json(route_to_json(route));
  ASSERT_EQ(back.lights().size(), 1u);
  EXPECT_EQ(back.lights()[0].cycle.size(), 3u);
  for (double t : {0.0, 17.5, 22.5, 47.5, 59.9}) {
    EXPECT_EQ(back.lights()[0].phase_at(t), route.lights()[0].phase_at(t))
        << t;
  }
  EXPECT_EQ(back.stop_active(0, 0.0), route.stop_active(0, 0.0));
}

TEST(RouteJson, FileRoundTripAndErrors) {
  const auto path = temp_path("route.json");
  write_route_json(path, make_default_route());
  const RouteMap back = read_route_json(path);
  EXPECT_EQ(back.stops().size(), 5u);

  EXPECT_THROW(route_from_json(json::parse(R"({"zones": []})")), IoError);
  EXPECT_THROW(route_from_json(json::parse(
                   R"({"total_length": 10, "zones": [{"start": 0, "limit": 5}],
                       "stops": [{"position": 2, "kind": "mystery"}]})")),
               IoError);
  EXPECT_THROW(read_route_json(temp_path("missing_route.json")), IoError);
}

TEST(ParamsJson, RoundTrips) {
  EdmParams p;
  p.a = 1.23;
  p.b = 2.34;
  p.delta = 3.45;
  p.theta0 = 0.56;
  p.s_brake = 67.8;
  const EdmParams back = params_from_json(params_to_json(p));
  EXPECT_EQ(back.a, p.a);
  EXPECT_EQ(back.b, p.b);
  EXPECT_EQ(back.delta, p.delta);
  EXPECT_EQ(back.theta0, p.theta0);
  EXPECT_EQ(back.s_brake, p.s_brake);
  EXPECT_THROW(params_from_json(json::parse(R"({"a": 1})")), IoError);
}

TEST(NormJson, RoundTripsAndValidates) {
  std::array<double, kNumChannels> lo = {0, -4, 0, 0, 0, -7};
  std::array<double, kNumChannels> hi = {22, 4, 900, 25, 1, 9};
  const NormStats norm(lo, hi);
  const NormStats back = norm_from_json(norm_to_json(norm));
  for (int c = 0; c < kNumChannels; ++c) {
    EXPECT_EQ(back.lo(static_cast<Channel>(c)),
              norm.lo(static_cast<Channel>(c)));
    EXPECT_EQ(back.hi(static_cast<Channel>(c)),
              norm.hi(static_cast<Channel>(c)));
  }
  EXPECT_THROW(norm_from_json(json::parse(R"({"lo": [0], "hi": [1]})")),
               IoError);
}

TEST(WindowJson, RoundTripsAndValidates) {
  const WindowConfig cfg = WindowConfig::make(30.0, 5.0, 0.1);
  const WindowConfig back = window_from_json(window_to_json(cfg));
  EXPECT_EQ(back.n_h, 300);
  EXPECT_EQ(back.n_p, 50);
  EXPECT_DOUBLE_EQ(back.dt, 0.1);

  json bad = window_to_json(cfg);
  bad["n_h"] = 7;  // inconsistent with t_h/dt
  EXPECT_THROW(window_from_json(bad), ConfigError);
}

TEST(Checkpoint, RoundTripsModelBitExact) {
  LstmEdConfig cfg;
  cfg.n_e = 6;
  cfg.n_d = 6;
  cfg.n_h = 20;
  cfg.n_p = 7;
  cfg.dropout_p = 0.15;
  const LstmEdModel model = init_model(cfg, 99);

  std::array<double, kNumChannels> lo = {0, -4, 0, 0, 0, -7};
  std::array<double, kNumChannels> hi = {22, 4, 900, 25, 1, 9};
  const NormStats norm(lo, hi);
  const WindowConfig wcfg = WindowConfig::make(2.0, 0.7, 0.1);

  const auto path = temp_path("model.ckpt");
  save_checkpoint(path, model, norm, wcfg);
  const Checkpoint cp = load_checkpoint(path);

  EXPECT_EQ(cp.model.config.n_e, cfg.n_e);
  EXPECT_EQ(cp.model.config.n_h, cfg.n_h);
  EXPECT_DOUBLE_EQ(cp.model.config.dropout_p, cfg.dropout_p);
  EXPECT_EQ(cp.window.n_h, wcfg.n_h);
  EXPECT_EQ(cp.norm.hi(Channel::V), 22.0);

  const auto got = tensor_ptrs(cp.model);
  const auto want = tensor_ptrs(model);
  for (int k = 0; k < kNumModelTensors; ++k)
    EXPECT_EQ(*got[static_cast<std::size_t>(k)],
              *want[static_cast<std::size_t>(k)])
        << tensor_names()[static_cast<std::size_t>(k)];
}

TEST(Checkpoint, StartsWithVersionMagic) {
  const LstmEdModel model = init_model(LstmEdConfig{}, 1);
  const auto path = temp_path("magic.ckpt");
  save_checkpoint(path, model, NormStats{}, WindowConfig{});
  const std::string text = read_text_file(path);
  EXPECT_EQ(text.substr(0, text.find('\n')), "LSTMED-v1");
}

TEST(Checkpoint, SaveIsByteDeterministic) {
  const LstmEdModel model = init_model(LstmEdConfig{}, 2);
  const auto p1 = temp_path("det1.ckpt");
  const auto p2 = temp_path("det2.ckpt");
  save_checkpoint(p1, model, NormStats{}, WindowConfig{});
  save_checkpoint(p2, model, NormStats{}, WindowConfig{});
  EXPECT_EQ(read_text_file(p1), read_text_file(p2));
}

TEST(Checkpoint, RejectsBadMagicAndShapes) {
  LstmEdConfig cfg;
  cfg.n_e = 3;
  cfg.n_d = 3;
  cfg.n_h = 4;
  cfg.n_p = 2;
  const LstmEdModel model = init_model(cfg, 3);
  const auto path = temp_path("tamper.ckpt");
  save_checkpoint(path, model, NormStats{}, WindowConfig::make(0.4, 0.2, 0.1));

  std::string text = read_text_file(path);
  write_text_file(temp_path("badmagic.ckpt"), "LSTMED-v2" + text.substr(9));
  EXPECT_THROW(load_checkpoint(temp_path("badmagic.ckpt")), IoError);

  const auto pos = text.find("\"shape\": [\n        3,");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 21, "\"shape\": [\n        4,");
  write_text_file(temp_path("badshape.ckpt"), text);
  EXPECT_THROW(load_checkpoint(temp_path("badshape.ckpt")), IoError);

  EXPECT_THROW(load_checkpoint(temp_path("absent.ckpt")), IoError);
}

TEST(DistCsv, HistogramAndStatsTables) {
  DistSummary d = dist_summary({1.0, 3.0, 3.0, 9.5}, 2, 0.0, 10.0);
  d.channel = DistChannel::TrackingError;
  d.source = DistSource::Lstm;

  const std::string hist = dist_histogram_csv({d});
  EXPECT_NE(hist.find("channel,source,bin_lo,bin_hi,count\n"),
            std::string::npos);
  EXPECT_NE(hist.find("tracking_error,lstm,0,5,3\n"), std::string::npos);
  EXPECT_NE(hist.find("tracking_error,lstm,5,10,1\n"), std::string::npos);

  const std::string stats = dist_stats_csv({d});
  EXPECT_NE(stats.find("channel,source,mean,std,samples\n"),
            std::string::npos);
  EXPECT_NE(stats.find("tracking_error,lstm,"), std::string::npos);
  EXPECT_NE(stats.find(",4\n"), std::string::npos);
}

}  // namespace
}  // namespace advisim

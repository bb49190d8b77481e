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

#ifndef ADVISIM_IO_HPP
#define ADVISIM_IO_HPP

#include <json.hpp>

#include <array>
#include <charconv>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "advisim/common.hpp"
#include "advisim/edm.hpp"
#include "advisim/eval.hpp"
#include "advisim/scenario.hpp"
#include "advisim/seqnet.hpp"
#include "advisim/trace.hpp"
#include "advisim/window.hpp"

namespace advisim {

using json = nlohmann::ordered_json;

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream out;
  out << in.rdbuf();
  if (in.bad()) throw IoError("read failed for " + path.string());
  return std::move(out).str();
}

inline void write_text_file(const std::filesystem::path& path,
                            const std::string& content) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + path.string());
  out << content;
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

inline json parse_json_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw IoError("invalid JSON in " + path.string());
  return j;
}

// --- drive trace CSV ---

inline constexpr const char* kTraceCsvHeader =
    "t,s,v,acc,d_tl,v_ref,tau_sp,err";

inline std::string trace_to_csv(const DriveTrace& trace) {
  std::string out = kTraceCsvHeader;
  out += '\n';
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out += shortest_double(trace.t[i]);
    for (const std::vector<double>* col :
         {&trace.s, &trace.v, &trace.acc, &trace.d_tl, &trace.v_ref,
          &trace.tau_sp, &trace.err}) {
      out += ',';
      out += shortest_double((*col)[i]);
    }
    out += '\n';
  }
  return out;
}

namespace io_detail {

inline double parse_double_field(std::string_view field, std::size_t line) {
  double value = 0.0;
  const auto res =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (res.ec != std::errc{} || res.ptr != field.data() + field.size())
    throw IoError("malformed number '" + std::string(field) + "' on line " +
                  std::to_string(line));
  return value;
}

}  // namespace io_detail

/// Parses the trace format emitted by trace_to_csv. The sample interval is
/// recovered from the first two timestamps.
inline DriveTrace trace_from_csv(const std::string& text,
                                 std::string driver_id = "") {
  DriveTrace trace;
  trace.driver_id = std::move(driver_id);

  std::string_view rest = text;
  std::size_t line_no = 0;
  const auto next_line = [&](std::string_view& line) {
    if (rest.empty()) return false;
    const auto pos = rest.find('\n');
    line = rest.substr(0, pos);
    rest = pos == std::string_view::npos ? std::string_view{}
                                         : rest.substr(pos + 1);
    ++line_no;
    return true;
  };

  std::string_view line;
  if (!next_line(line) || line != kTraceCsvHeader)
    throw IoError("trace CSV must start with header '" +
                  std::string(kTraceCsvHeader) + "'");

  while (next_line(line)) {
    if (line.empty()) continue;
    std::array<double, 8> fields{};
    std::size_t field = 0;
    std::string_view cols = line;
    while (true) {
      const auto comma = cols.find(',');
      const std::string_view cell = cols.substr(0, comma);
      if (field >= fields.size())
        throw IoError("too many columns on line " + std::to_string(line_no));
      fields[field++] = io_detail::parse_double_field(cell, line_no);
      if (comma == std::string_view::npos) break;
      cols = cols.substr(comma + 1);
    }
    if (field != fields.size())
      throw IoError("expected 8 columns on line " + std::to_string(line_no));
    trace.t.push_back(fields[0]);
    trace.s.push_back(fields[1]);
    trace.v.push_back(fields[2]);
    trace.acc.push_back(fields[3]);
    trace.d_tl.push_back(fields[4]);
    trace.v_ref.push_back(fields[5]);
    trace.tau_sp.push_back(fields[6]);
    trace.err.push_back(fields[7]);
  }
  if (trace.size() >= 2) trace.dt = trace.t[1] - trace.t[0];
  return trace;
}

inline void write_trace_csv(const std::filesystem::path& path,
                            const DriveTrace& trace) {
  write_text_file(path, trace_to_csv(trace));
}

/// Reads a trace file; the driver id defaults to the file name stem.
inline DriveTrace read_trace_csv(const std::filesystem::path& path) {
  return trace_from_csv(read_text_file(path), path.stem().string());
}

// --- reference profile CSV ---

inline constexpr const char* kProfileCsvHeader = "t,v_ref";

inline std::string profile_to_csv(const ReferenceProfile& profile) {
  std::string out = kProfileCsvHeader;
  out += '\n';
  for (std::size_t i = 0; i < profile.v.size(); ++i) {
    out += shortest_double(static_cast<double>(i) * profile.dt);
    out += ',';
    out += shortest_double(profile.v[i]);
    out += '\n';
  }
  return out;
}

inline ReferenceProfile profile_from_csv(const std::string& text) {
  ReferenceProfile profile;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<double> times;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1) {
      if (line != kProfileCsvHeader)
        throw IoError("profile CSV must start with header '" +
                      std::string(kProfileCsvHeader) + "'");
      continue;
    }
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw IoError("expected 2 columns on line " + std::to_string(line_no));
    times.push_back(io_detail::parse_double_field(
        std::string_view(line).substr(0, comma), line_no));
    profile.v.push_back(io_detail::parse_double_field(
        std::string_view(line).substr(comma + 1), line_no));
  }
  if (times.size() >= 2) profile.dt = times[1] - times[0];
  return profile;
}

// --- route JSON ---

inline const char* stop_kind_name(StopKind k) {
  return k == StopKind::StopSign ? "stop_sign" : "signalized";
}

inline const char* signal_phase_name(SignalPhase p) {
  switch (p) {
    case SignalPhase::Green:
      return "green";
    case SignalPhase::Yellow:
      return "yellow";
    default:
      return "red";
  }
}

inline json route_to_json(const RouteMap& route) {
  json j;
  j["total_length"] = route.total_length();
  j["zones"] = json::array();
  for (const LimitZone& z : route.zones())
    j["zones"].push_back({{"start", z.start}, {"limit", z.limit}});
  j["stops"] = json::array();
  for (const StopPoint& s : route.stops())
    j["stops"].push_back(
        {{"position", s.position}, {"kind", stop_kind_name(s.kind)}});
  j["lights"] = json::array();
  for (const TrafficLight& l : route.lights()) {
    json cycle = json::array();
    for (const PhaseInterval& p : l.cycle)
      cycle.push_back(
          {{"phase", signal_phase_name(p.phase)}, {"duration", p.duration}});
    j["lights"].push_back({{"position", l.position},
                           {"cycle", std::move(cycle)},
                           {"cycle_offset", l.cycle_offset}});
  }
  return j;
}

inline RouteMap route_from_json(const json& j) {
  try {
    std::vector<LimitZone> zones;
    for (const json& z : j.at("zones"))
      zones.push_back({z.at("start").get<double>(),
                       z.at("limit").get<double>()});
    std::vector<StopPoint> stops;
    for (const json& s : j.value("stops", json::array())) {
      const std::string kind = s.at("kind").get<std::string>();
      StopPoint p;
      p.position = s.at("position").get<double>();
      if (kind == "stop_sign")
        p.kind = StopKind::StopSign;
      else if (kind == "signalized")
        p.kind = StopKind::SignalizedStop;
      else
        throw IoError("unknown stop kind '" + kind + "'");
      stops.push_back(p);
    }
    std::vector<TrafficLight> lights;
    for (const json& l : j.value("lights", json::array())) {
      TrafficLight light;
      light.position = l.at("position").get<double>();
      light.cycle_offset = l.value("cycle_offset", 0.0);
      for (const json& p : l.at("cycle")) {
        const std::string phase = p.at("phase").get<std::string>();
        PhaseInterval interval;
        interval.duration = p.at("duration").get<double>();
        if (phase == "green")
          interval.phase = SignalPhase::Green;
        else if (phase == "yellow")
          interval.phase = SignalPhase::Yellow;
        else if (phase == "red")
          interval.phase = SignalPhase::Red;
        else
          throw IoError("unknown signal phase '" + phase + "'");
        light.cycle.push_back(interval);
      }
      lights.push_back(std::move(light));
    }
    return RouteMap(j.at("total_length").get<double>(), std::move(zones),
                    std::move(stops), std::move(lights));
  } catch (const json::exception& e) {
    throw IoError(std::string("route JSON: ") + e.what());
  }
}

inline void write_route_json(const std::filesystem::path& path,
                             const RouteMap& route) {
  write_text_file(path, route_to_json(route).dump(2) + "\n");
}

inline RouteMap read_route_json(const std::filesystem::path& path) {
  return route_from_json(parse_json_file(path));
}

// --- small JSON helpers shared by checkpoints and manifests ---

inline json params_to_json(const EdmParams& p) {
  return {{"a", p.a},
          {"b", p.b},
          {"delta", p.delta},
          {"theta0", p.theta0},
          {"s_brake", p.s_brake}};
}

inline EdmParams params_from_json(const json& j) {
  try {
    EdmParams p;
    p.a = j.at("a").get<double>();
    p.b = j.at("b").get<double>();
    p.delta = j.at("delta").get<double>();
    p.theta0 = j.at("theta0").get<double>();
    p.s_brake = j.at("s_brake").get<double>();
    return p;
  } catch (const json::exception& e) {
    throw IoError(std::string("params JSON: ") + e.what());
  }
}

inline json norm_to_json(const NormStats& norm) {
  json lo = json::array();
  json hi = json::array();
  for (int c = 0; c < kNumChannels; ++c) {
    lo.push_back(norm.lo(static_cast<Channel>(c)));
    hi.push_back(norm.hi(static_cast<Channel>(c)));
  }
  return {{"lo", std::move(lo)}, {"hi", std::move(hi)}};
}

inline NormStats norm_from_json(const json& j) {
  try {
    std::array<double, kNumChannels> lo{};
    std::array<double, kNumChannels> hi{};
    if (j.at("lo").size() != kNumChannels ||
        j.at("hi").size() != kNumChannels)
      throw IoError("norm stats need 6 channel bounds");
    for (int c = 0; c < kNumChannels; ++c) {
      lo[static_cast<std::size_t>(c)] =
          j.at("lo")[static_cast<std::size_t>(c)].get<double>();
      hi[static_cast<std::size_t>(c)] =
          j.at("hi")[static_cast<std::size_t>(c)].get<double>();
    }
    return NormStats(lo, hi);
  } catch (const json::exception& e) {
    throw IoError(std::string("norm JSON: ") + e.what());
  }
}

inline json window_to_json(const WindowConfig& cfg) {
  return {{"t_h", cfg.t_h},
          {"t_p", cfg.t_p},
          {"dt", cfg.dt},
          {"n_h", cfg.n_h},
          {"n_p", cfg.n_p}};
}

inline WindowConfig window_from_json(const json& j) {
  try {
    WindowConfig cfg;
    cfg.t_h = j.at("t_h").get<double>();
    cfg.t_p = j.at("t_p").get<double>();
    cfg.dt = j.at("dt").get<double>();
    cfg.n_h = j.at("n_h").get<int>();
    cfg.n_p = j.at("n_p").get<int>();
    cfg.validate();
    return cfg;
  } catch (const json::exception& e) {
    throw IoError(std::string("window JSON: ") + e.what());
  }
}

// --- model checkpoint ---

inline constexpr const char* kCheckpointMagic = "LSTMED-v1";

struct Checkpoint {
  LstmEdModel model;
  NormStats norm;
  WindowConfig window;
};

/// First line is the version magic, the rest one JSON document holding the
/// configs, normalization bounds and all weight tensors in row-major order.
inline void save_checkpoint(const std::filesystem::path& path,
                            const LstmEdModel& model, const NormStats& norm,
                            const WindowConfig& window) {
  json j;
  j["config"] = {{"n_e", model.config.n_e},
                 {"n_d", model.config.n_d},
                 {"n_in", model.config.n_in},
                 {"n_out", model.config.n_out},
                 {"dropout_p", model.config.dropout_p},
                 {"n_h", model.config.n_h},
                 {"n_p", model.config.n_p}};
  j["window"] = window_to_json(window);
  j["norm"] = norm_to_json(norm);

  json weights;
  const auto tensors = tensor_ptrs(model);
  for (int k = 0; k < kNumModelTensors; ++k) {
    const Eigen::MatrixXd& m = *tensors[static_cast<std::size_t>(k)];
    json data = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
    weights[tensor_names()[static_cast<std::size_t>(k)]] = {
        {"shape", {m.rows(), m.cols()}}, {"data", std::move(data)}};
  }
  j["weights"] = std::move(weights);

  write_text_file(path, std::string(kCheckpointMagic) + "\n" + j.dump(2) +
                            "\n");
}

inline Checkpoint load_checkpoint(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  const auto newline = text.find('\n');
  if (newline == std::string::npos ||
      text.substr(0, newline) != kCheckpointMagic)
    throw IoError(path.string() + " is not a " +
                  std::string(kCheckpointMagic) + " checkpoint");
  json j = json::parse(text.substr(newline + 1), nullptr, false);
  if (j.is_discarded())
    throw IoError("invalid JSON in checkpoint " + path.string());

  try {
    Checkpoint cp;
    const json& cfg = j.at("config");
    cp.model.config.n_e = cfg.at("n_e").get<int>();
    cp.model.config.n_d = cfg.at("n_d").get<int>();
    cp.model.config.n_in = cfg.at("n_in").get<int>();
    cp.model.config.n_out = cfg.at("n_out").get<int>();
    cp.model.config.dropout_p = cfg.at("dropout_p").get<double>();
    cp.model.config.n_h = cfg.at("n_h").get<int>();
    cp.model.config.n_p = cfg.at("n_p").get<int>();
    cp.model.config.validate();
    cp.window = window_from_json(j.at("window"));
    cp.norm = norm_from_json(j.at("norm"));

    cp.model.encoder =
        LstmLayerWeights::zeros(cp.model.config.n_e, cp.model.config.n_in);
    cp.model.decoder =
        LstmLayerWeights::zeros(cp.model.config.n_d, cp.model.config.n_in);
    cp.model.head_w.setZero(cp.model.config.n_out, cp.model.config.n_d);
    cp.model.head_b.setZero(cp.model.config.n_out, 1);
    cp.model.bridge_w.setZero(cp.model.config.n_in, cp.model.config.n_out);
    cp.model.bridge_b.setZero(cp.model.config.n_in, 1);

    const json& weights = j.at("weights");
    const auto tensors = tensor_ptrs(cp.model);
    for (int k = 0; k < kNumModelTensors; ++k) {
      const char* name = tensor_names()[static_cast<std::size_t>(k)];
      if (!weights.contains(name))
        throw IoError(std::string("checkpoint missing tensor ") + name);
      const json& entry = weights.at(name);
      Eigen::MatrixXd& m = *tensors[static_cast<std::size_t>(k)];
      const json& shape = entry.at("shape");
      if (shape.size() != 2 ||
          shape[0].get<Eigen::Index>() != m.rows() ||
          shape[1].get<Eigen::Index>() != m.cols())
        throw IoError(std::string("checkpoint tensor ") + name +
                      " has unexpected shape");
      const json& data = entry.at("data");
      if (static_cast<Eigen::Index>(data.size()) != m.size())
        throw IoError(std::string("checkpoint tensor ") + name +
                      " has wrong element count");
      std::size_t idx = 0;
      for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
          m(r, c) = data[idx++].get<double>();
    }
    return cp;
  } catch (const json::exception& e) {
    throw IoError(std::string("checkpoint JSON: ") + e.what());
  }
}

// --- plot-ready distribution tables ---

inline std::string dist_histogram_csv(const std::vector<DistSummary>& dists) {
  std::string out = "channel,source,bin_lo,bin_hi,count\n";
  for (const DistSummary& d : dists) {
    const double width =
        (d.hi - d.lo) / static_cast<double>(d.counts.size());
    for (std::size_t b = 0; b < d.counts.size(); ++b) {
      out += dist_channel_name(d.channel);
      out += ',';
      out += dist_source_name(d.source);
      out += ',';
      out += shortest_double(d.lo + static_cast<double>(b) * width);
      out += ',';
      out += shortest_double(d.lo + static_cast<double>(b + 1) * width);
      out += ',';
      out += std::to_string(d.counts[b]);
      out += '\n';
    }
  }
  return out;
}

inline std::string dist_stats_csv(const std::vector<DistSummary>& dists) {
  std::string out = "channel,source,mean,std,samples\n";
  for (const DistSummary& d : dists) {
    std::size_t n = 0;
    for (auto c : d.counts) n += c;
    out += dist_channel_name(d.channel);
    out += ',';
    out += dist_source_name(d.source);
    out += ',';
    out += shortest_double(d.mean);
    out += ',';
    out += shortest_double(d.stddev);
    out += ',';
    out += std::to_string(n);
    out += '\n';
  }
  return out;
}

}  // namespace advisim

#endif  // ADVISIM_IO_HPP

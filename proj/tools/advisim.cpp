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

// Command-line pipeline around the advisim library. Stages exchange plain
// CSV/JSON artifacts so each one can be rerun, inspected or replaced, and
// every manifest records the seeds that produced it: the same command on
// the same inputs writes byte-identical outputs.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "advisim/common.hpp"
#include "advisim/edm.hpp"
#include "advisim/eval.hpp"
#include "advisim/ga.hpp"
#include "advisim/io.hpp"
#include "advisim/scenario.hpp"
#include "advisim/seqnet.hpp"
#include "advisim/synth.hpp"
#include "advisim/trace.hpp"
#include "advisim/window.hpp"

namespace {

namespace fs = std::filesystem;
using advisim::json;

constexpr int kExitUsage = 2;
constexpr int kExitMissingInput = 3;
constexpr int kExitBadConfig = 4;
constexpr int kExitStageFailed = 5;
constexpr int kExitIo = 6;

/// A required input path does not exist. Gets its own exit code so
/// scripts can tell "run the earlier stage first" from a malformed file.
class MissingInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

fs::path require_input(const fs::path& path) {
  if (!fs::exists(path))
    throw MissingInputError("missing input file: " + path.string());
  return path;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
    throw advisim::IoError("cannot create directory " + dir.string() + ": " +
                           ec.message());
}

std::string seq_name(const char* stem, int i) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%03d", stem, i);
  return buf;
}

void write_manifest(const fs::path& path, const json& j) {
  advisim::write_text_file(path, j.dump(2) + "\n");
}

json load_manifest(const fs::path& path, const std::string& kind) {
  require_input(path);
  const json j = advisim::parse_json_file(path);
  if (!j.is_object() || j.value("kind", std::string()) != kind)
    throw advisim::IoError(path.string() + " is not a " + kind + " manifest");
  return j;
}

/// Loads the advisory profiles listed in a refs manifest, resolving file
/// entries relative to the manifest's directory.
std::vector<advisim::ReferenceProfile> load_refs(const fs::path& manifest) {
  const json j = load_manifest(manifest, "refs");
  const fs::path dir = manifest.parent_path();
  std::vector<advisim::ReferenceProfile> refs;
  try {
    for (const json& entry : j.at("refs")) {
      const fs::path file = dir / entry.at("file").get<std::string>();
      require_input(file);
      refs.push_back(advisim::profile_from_csv(advisim::read_text_file(file)));
    }
  } catch (const json::exception& e) {
    throw advisim::IoError(manifest.string() + ": " + e.what());
  }
  if (refs.empty())
    throw advisim::IoError(manifest.string() + " lists no profiles");
  return refs;
}

std::vector<advisim::DriveTrace> load_fleet(const fs::path& manifest) {
  const json j = load_manifest(manifest, "fleet");
  const fs::path dir = manifest.parent_path();
  std::vector<advisim::DriveTrace> traces;
  try {
    for (const json& entry : j.at("drivers")) {
      const fs::path file = dir / entry.at("file").get<std::string>();
      require_input(file);
      traces.push_back(advisim::read_trace_csv(file));
    }
  } catch (const json::exception& e) {
    throw advisim::IoError(manifest.string() + ": " + e.what());
  }
  if (traces.empty())
    throw advisim::IoError(manifest.string() + " lists no traces");
  return traces;
}

std::map<std::string, advisim::EdmParams> load_calibrations(
    const fs::path& path) {
  const json j = load_manifest(path, "calibrations");
  std::map<std::string, advisim::EdmParams> out;
  try {
    for (const auto& [id, entry] : j.at("results").items())
      out[id] = advisim::params_from_json(entry.at("params"));
  } catch (const json::exception& e) {
    throw advisim::IoError(path.string() + ": " + e.what());
  }
  if (out.empty()) throw advisim::IoError(path.string() + " holds no results");
  return out;
}

struct Split {
  std::vector<std::string> train;
  std::vector<std::string> test;
};

Split load_split(const fs::path& path) {
  const json j = load_manifest(path, "split");
  Split s;
  try {
    s.train = j.at("train").get<std::vector<std::string>>();
    s.test = j.at("test").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw advisim::IoError(path.string() + ": " + e.what());
  }
  return s;
}

std::vector<std::string> subset_ids(const Split& s, const std::string& which) {
  if (which == "train") return s.train;
  if (which == "test") return s.test;
  if (which == "all") {
    std::vector<std::string> ids = s.train;
    ids.insert(ids.end(), s.test.begin(), s.test.end());
    return ids;
  }
  throw advisim::ConfigError("--subset must be train, test or all");
}

std::vector<advisim::DriveTrace> filter_traces(
    std::vector<advisim::DriveTrace> traces,
    const std::vector<std::string>& keep) {
  std::vector<advisim::DriveTrace> out;
  for (const std::string& id : keep) {
    bool found = false;
    for (auto& t : traces) {
      if (t.driver_id == id) {
        out.push_back(std::move(t));
        found = true;
        break;
      }
    }
    if (!found)
      throw advisim::ConfigError("split names driver " + id +
                                 " which the fleet does not contain");
  }
  return out;
}

// --- gen-route ---

struct GenRouteOpts {
  std::string out = "route.json";
  bool signals = false;
};

void run_gen_route(const GenRouteOpts& o) {
  advisim::write_route_json(o.out, o.signals
                                       ? advisim::make_signalized_route()
                                       : advisim::make_default_route());
  std::cerr << "wrote " << o.out << "\n";
}

// --- gen-refs ---

struct GenRefsOpts {
  std::string route;
  std::string out = "refs";
  int count = 10;
  double dt = 0.1;
  // Published advisories never drop below this. The tracking model is
  // undefined for advisories at or below theta0, so the floor must clear
  // the theta0 sampling bound; stopping still comes from the route's stop
  // points, not from the displayed speed.
  double min_advisory = 2.5;
  std::uint64_t seed = 0;
};

void run_gen_refs(const GenRefsOpts& o) {
  if (o.count < 1) throw advisim::ConfigError("--count must be at least 1");
  if (!(o.dt > 0.0)) throw advisim::ConfigError("--dt must be positive");
  if (!(o.min_advisory >= 0.0))
    throw advisim::ConfigError("--min-advisory must be non-negative");
  const advisim::RouteMap route =
      advisim::read_route_json(require_input(o.route));
  ensure_dir(o.out);

  std::vector<std::uint64_t> seeds;
  std::vector<advisim::EdmParams> params;
  for (int i = 0; i < o.count; ++i) {
    seeds.push_back(advisim::derive_seed(o.seed, static_cast<std::uint64_t>(i)));
    params.push_back(advisim::sample_driver_params(seeds.back()));
  }
  std::vector<advisim::ReferenceProfile> profiles =
      advisim::generate_reference(params, route, o.dt);
  for (advisim::ReferenceProfile& p : profiles)
    for (double& x : p.v) x = std::max(x, o.min_advisory);

  json manifest;
  manifest["kind"] = "refs";
  manifest["seed"] = o.seed;
  manifest["dt"] = o.dt;
  manifest["count"] = o.count;
  manifest["min_advisory"] = o.min_advisory;
  manifest["route"] = o.route;
  json list = json::array();
  for (int i = 0; i < o.count; ++i) {
    const std::string name = seq_name("ref", i) + ".csv";
    advisim::write_text_file(fs::path(o.out) / name,
                             advisim::profile_to_csv(profiles[i]));
    json entry;
    entry["file"] = name;
    entry["param_seed"] = seeds[static_cast<std::size_t>(i)];
    entry["params"] = advisim::params_to_json(params[static_cast<std::size_t>(i)]);
    list.push_back(std::move(entry));
  }
  manifest["refs"] = std::move(list);
  write_manifest(fs::path(o.out) / "refs_manifest.json", manifest);
  std::cerr << "wrote " << o.count << " advisory profiles to " << o.out << "\n";
}

// --- gen-data ---

struct GenDataOpts {
  std::string route;
  std::string refs;
  std::string out = "data";
  int drivers = 71;
  double duration = 300.0;
  double dt = 0.1;
  double sigma = 0.3;
  double tau_noise = 3.0;
  double delay = 0.5;
  std::uint64_t seed = 0;
};

void run_gen_data(const GenDataOpts& o) {
  if (o.drivers < 1) throw advisim::ConfigError("--drivers must be at least 1");
  if (!(o.duration > 0.0))
    throw advisim::ConfigError("--duration must be positive");
  if (!(o.dt > 0.0)) throw advisim::ConfigError("--dt must be positive");
  const advisim::RouteMap route =
      advisim::read_route_json(require_input(o.route));
  const std::vector<advisim::ReferenceProfile> refs = load_refs(o.refs);
  ensure_dir(o.out);

  advisim::NoiseConfig base;
  base.sigma_a = o.sigma;
  base.tau_noise = o.tau_noise;
  base.perception_delay = o.delay;
  base.validate();

  advisim::SimOptions opts;
  opts.duration = o.duration;

  // Separate derived streams for parameters and noise so the two never
  // collide regardless of the fleet size.
  const std::uint64_t param_stream = advisim::derive_seed(o.seed, 1);
  const std::uint64_t noise_stream = advisim::derive_seed(o.seed, 2);

  json manifest;
  manifest["kind"] = "fleet";
  manifest["seed"] = o.seed;
  manifest["dt"] = o.dt;
  manifest["duration"] = o.duration;
  manifest["noise"] = {{"sigma_a", o.sigma},
                       {"tau_noise", o.tau_noise},
                       {"perception_delay", o.delay}};
  manifest["route"] = o.route;
  manifest["refs"] = o.refs;
  json list = json::array();
  for (int i = 0; i < o.drivers; ++i) {
    const std::string id = seq_name("driver", i);
    const auto idx = static_cast<std::uint64_t>(i);
    const std::uint64_t param_seed = advisim::derive_seed(param_stream, idx);
    const advisim::EdmParams params = advisim::sample_driver_params(param_seed);
    advisim::NoiseConfig noise = base;
    noise.seed = advisim::derive_seed(noise_stream, idx);
    const std::size_t ref_idx = static_cast<std::size_t>(i) % refs.size();

    advisim::DriveTrace trace =
        advisim::simulate_human(params, noise, refs[ref_idx], route, o.dt, opts);
    trace.driver_id = id;
    advisim::write_trace_csv(fs::path(o.out) / (id + ".csv"), trace);

    json entry;
    entry["file"] = id + ".csv";
    entry["driver_id"] = id;
    entry["param_seed"] = param_seed;
    entry["noise_seed"] = noise.seed;
    entry["ref"] = ref_idx;
    entry["params"] = advisim::params_to_json(params);
    list.push_back(std::move(entry));
  }
  manifest["drivers"] = std::move(list);
  write_manifest(fs::path(o.out) / "data_manifest.json", manifest);
  std::cerr << "wrote " << o.drivers << " driver traces to " << o.out << "\n";
}

// --- calibrate ---

struct CalibrateOpts {
  std::string data;
  std::string route;
  std::string out = "calib";
  std::string split;
  std::string subset = "test";
  int population = 50;
  int generations = 60;
  std::uint64_t seed = 0;
};

std::string param_dist_csv(const std::vector<advisim::ParamDistribution>& dists) {
  std::string out = "param,mean,std,lo,hi";
  for (std::size_t b = 0; b < std::tuple_size_v<decltype(advisim::ParamDistribution::bins)>; ++b)
    out += ",bin_" + std::to_string(b);
  out += '\n';
  for (const advisim::ParamDistribution& d : dists) {
    out += d.name;
    out += ',';
    out += advisim::shortest_double(d.mean);
    out += ',';
    out += advisim::shortest_double(d.stddev);
    out += ',';
    out += advisim::shortest_double(d.lo);
    out += ',';
    out += advisim::shortest_double(d.hi);
    for (std::size_t c : d.bins) {
      out += ',';
      out += std::to_string(c);
    }
    out += '\n';
  }
  return out;
}

void run_calibrate(const CalibrateOpts& o) {
  const advisim::RouteMap route =
      advisim::read_route_json(require_input(o.route));
  std::vector<advisim::DriveTrace> traces = load_fleet(o.data);
  if (!o.split.empty())
    traces = filter_traces(std::move(traces),
                           subset_ids(load_split(o.split), o.subset));
  ensure_dir(o.out);

  advisim::GaConfig base;
  base.population = o.population;
  base.generations = o.generations;
  base.validate();

  json results = json::object();
  std::vector<advisim::CalibrationResult> all;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    advisim::GaConfig cfg = base;
    cfg.seed = advisim::derive_seed(o.seed, i);
    const advisim::CalibrationResult r =
        advisim::calibrate(traces[i], route, cfg);
    all.push_back(r);
    json entry;
    entry["params"] = advisim::params_to_json(r.best);
    entry["fitness"] = r.best_fitness;
    entry["seed"] = cfg.seed;
    results[traces[i].driver_id] = std::move(entry);
    std::cerr << "calibrated " << traces[i].driver_id << " fitness "
              << r.best_fitness << "\n";
  }

  json manifest;
  manifest["kind"] = "calibrations";
  manifest["seed"] = o.seed;
  manifest["ga"] = {{"population", base.population},
                    {"generations", base.generations},
                    {"crossover_rate", base.crossover_rate},
                    {"mutation_rate", base.mutation_rate},
                    {"mutation_sigma_frac", base.mutation_sigma_frac},
                    {"elitism", base.elitism}};
  manifest["results"] = std::move(results);
  write_manifest(fs::path(o.out) / "calibrations.json", manifest);
  advisim::write_text_file(fs::path(o.out) / "param_distributions.csv",
                           param_dist_csv(advisim::population_summary(all)));
  std::cerr << "calibrated " << traces.size() << " drivers to " << o.out
            << "\n";
}

// --- train ---

struct TrainOpts {
  std::string data;
  std::string out = "model";
  double t_h = 30.0;
  double t_p = 5.0;
  int n_test = 5;
  std::uint64_t split_seed = 0;
  std::uint64_t seed = 0;
  int epochs = 10;
  int hidden = 64;
  int batch = 16;
  double lr = 1e-3;
  double dropout = 0.2;
  double tf = 0.5;
  std::size_t windows_per_epoch = 0;
};

void run_train(const TrainOpts& o) {
  if (o.n_test < 0) throw advisim::ConfigError("--n-test must be non-negative");
  const std::vector<advisim::DriveTrace> traces = load_fleet(o.data);
  const advisim::WindowConfig wcfg =
      advisim::WindowConfig::make(o.t_h, o.t_p, traces.front().dt);

  std::vector<std::string> skipped;
  const auto [train_ds, test_ds] = advisim::window_dataset(
      traces, wcfg, o.split_seed, static_cast<std::size_t>(o.n_test), &skipped);
  ensure_dir(o.out);

  json split;
  split["kind"] = "split";
  split["split_seed"] = o.split_seed;
  split["n_test"] = o.n_test;
  split["train"] = train_ds.driver_ids();
  split["test"] = test_ds.driver_ids();
  split["skipped"] = skipped;
  write_manifest(fs::path(o.out) / "split.json", split);

  advisim::LstmEdConfig mcfg;
  mcfg.n_e = o.hidden;
  mcfg.n_d = o.hidden;
  mcfg.dropout_p = o.dropout;
  mcfg.n_h = wcfg.n_h;
  mcfg.n_p = wcfg.n_p;

  advisim::TrainConfig tcfg;
  tcfg.epochs = o.epochs;
  tcfg.batch_size = o.batch;
  tcfg.learning_rate = o.lr;
  tcfg.teacher_forcing_ratio = o.tf;
  tcfg.seed = o.seed;
  tcfg.windows_per_epoch = o.windows_per_epoch;

  std::cerr << "training on " << train_ds.size() << " windows from "
            << train_ds.trace_count() << " drivers\n";
  const auto [model, history] = advisim::train(train_ds, mcfg, tcfg);

  advisim::save_checkpoint(fs::path(o.out) / "model.ckpt", model,
                           train_ds.norm(), wcfg);
  std::string log = "epoch,loss\n";
  for (std::size_t e = 0; e < history.size(); ++e) {
    log += std::to_string(e + 1);
    log += ',';
    log += advisim::shortest_double(history[e]);
    log += '\n';
  }
  advisim::write_text_file(fs::path(o.out) / "training_log.csv", log);
  if (!history.empty())
    std::cerr << "final training loss " << history.back() << "\n";
  std::cerr << "wrote model to " << o.out << "\n";
}

// --- predict ---

struct PredictOpts {
  std::string model;
  std::string history;
  std::string out = "prediction.csv";
};

void run_predict(const PredictOpts& o) {
  require_input(o.history);
  const advisim::Checkpoint ckpt =
      advisim::load_checkpoint(require_input(o.model));
  const advisim::DriveTrace trace = advisim::read_trace_csv(o.history);

  const int n_h = ckpt.window.n_h;
  if (static_cast<int>(trace.size()) < n_h)
    throw advisim::ConfigError(
        "history holds " + std::to_string(trace.size()) +
        " samples but the model needs " + std::to_string(n_h));

  Eigen::MatrixXd hist(advisim::kNumChannels, n_h);
  const std::size_t start = trace.size() - static_cast<std::size_t>(n_h);
  for (int c = 0; c < advisim::kNumChannels; ++c) {
    const std::vector<double>& raw =
        trace.channel(static_cast<advisim::Channel>(c));
    for (int k = 0; k < n_h; ++k)
      hist(c, k) = raw[start + static_cast<std::size_t>(k)];
  }

  const auto [v_hat, err_hat] = advisim::predict(ckpt.model, ckpt.norm, hist);
  std::string csv = "t_offset,v_hat,err_hat\n";
  for (std::size_t k = 0; k < v_hat.size(); ++k) {
    csv += advisim::shortest_double(static_cast<double>(k + 1) * ckpt.window.dt);
    csv += ',';
    csv += advisim::shortest_double(v_hat[k]);
    csv += ',';
    csv += advisim::shortest_double(err_hat[k]);
    csv += '\n';
  }
  advisim::write_text_file(o.out, csv);
  std::cerr << "wrote " << v_hat.size() << "-step prediction to " << o.out
            << "\n";
}

// --- evaluate ---

struct EvaluateOpts {
  std::string model;
  std::string data;
  std::string split;
  std::string subset = "test";
  std::string out = "evaluation.csv";
};

std::string scores_csv(const std::vector<advisim::DriverScore>& scores) {
  std::string out = "driver_id,rmse_v,rmse_err,points\n";
  for (const advisim::DriverScore& s : scores) {
    out += s.driver_id;
    out += ',';
    out += advisim::shortest_double(s.rmse_v);
    out += ',';
    out += advisim::shortest_double(s.rmse_err);
    out += ',';
    out += std::to_string(s.points);
    out += '\n';
  }
  return out;
}

void run_evaluate(const EvaluateOpts& o) {
  const advisim::Checkpoint ckpt =
      advisim::load_checkpoint(require_input(o.model));
  std::vector<advisim::DriveTrace> traces = load_fleet(o.data);
  if (!o.split.empty())
    traces = filter_traces(std::move(traces),
                           subset_ids(load_split(o.split), o.subset));

  std::vector<std::string> skipped;
  const std::vector<advisim::DriverScore> scores = advisim::evaluate_lstmed(
      ckpt.model, ckpt.norm, traces, ckpt.window, &skipped);
  advisim::write_text_file(o.out, scores_csv(scores));
  for (const std::string& id : skipped)
    std::cerr << "skipped " << id << " (shorter than one window)\n";
  std::cerr << "evaluated " << scores.size() << " drivers to " << o.out << "\n";
}

// --- compare ---

struct CompareOpts {
  std::string model;
  std::string data;
  std::string split;
  std::string calibrations;
  std::string route;
  std::string out = "compare";
};

void run_compare(const CompareOpts& o) {
  const advisim::Checkpoint ckpt =
      advisim::load_checkpoint(require_input(o.model));
  const advisim::RouteMap route =
      advisim::read_route_json(require_input(o.route));
  const std::map<std::string, advisim::EdmParams> calib =
      load_calibrations(o.calibrations);
  const Split split = load_split(o.split);
  const std::vector<advisim::DriveTrace> test =
      filter_traces(load_fleet(o.data), split.test);
  ensure_dir(o.out);

  std::vector<advisim::PooledSeries> lstm_pool;
  std::vector<advisim::PooledSeries> edm_pool;
  const auto lstm_scores = advisim::evaluate_lstmed(
      ckpt.model, ckpt.norm, test, ckpt.window, nullptr, &lstm_pool);
  const auto edm_scores = advisim::evaluate_edm(calib, test, route, &edm_pool);

  const advisim::ComparisonReport report =
      advisim::comparison_table(advisim::make_comparison(lstm_scores, edm_scores));
  advisim::write_text_file(fs::path(o.out) / "comparison.txt", report.text);
  advisim::write_text_file(fs::path(o.out) / "comparison.csv", report.csv);

  // Pool each source over all test drivers and histogram on the fixed
  // velocity and tracking-error ranges so the three sources line up.
  std::vector<double> actual_v;
  std::vector<double> actual_err;
  for (const advisim::DriveTrace& t : test) {
    actual_v.insert(actual_v.end(), t.v.begin(), t.v.end());
    actual_err.insert(actual_err.end(), t.err.begin(), t.err.end());
  }
  auto pool = [](const std::vector<advisim::PooledSeries>& series, bool err) {
    std::vector<double> all;
    for (const advisim::PooledSeries& p : series) {
      const std::vector<double>& src = err ? p.err : p.v;
      all.insert(all.end(), src.begin(), src.end());
    }
    return all;
  };
  auto summarize = [](std::vector<double> series, advisim::DistChannel ch,
                      advisim::DistSource src) {
    const bool vel = ch == advisim::DistChannel::Velocity;
    advisim::DistSummary d = advisim::dist_summary(
        series, advisim::kDistBins,
        vel ? advisim::kVelDistLo : advisim::kErrDistLo,
        vel ? advisim::kVelDistHi : advisim::kErrDistHi);
    d.channel = ch;
    d.source = src;
    return d;
  };
  const std::vector<advisim::DistSummary> dists = {
      summarize(actual_v, advisim::DistChannel::Velocity,
                advisim::DistSource::Actual),
      summarize(pool(lstm_pool, false), advisim::DistChannel::Velocity,
                advisim::DistSource::Lstm),
      summarize(pool(edm_pool, false), advisim::DistChannel::Velocity,
                advisim::DistSource::Edm),
      summarize(actual_err, advisim::DistChannel::TrackingError,
                advisim::DistSource::Actual),
      summarize(pool(lstm_pool, true), advisim::DistChannel::TrackingError,
                advisim::DistSource::Lstm),
      summarize(pool(edm_pool, true), advisim::DistChannel::TrackingError,
                advisim::DistSource::Edm)};
  advisim::write_text_file(fs::path(o.out) / "distributions.csv",
                           advisim::dist_histogram_csv(dists));
  advisim::write_text_file(fs::path(o.out) / "distribution_stats.csv",
                           advisim::dist_stats_csv(dists));

  std::cout << report.text;
}

// --- repro ---

struct ReproOpts {
  std::string out = "repro";
  std::uint64_t seed = 1;
  // The comparison protocol targets a signalized corridor: the distance and
  // phase input channels only carry information when lights exist.
  bool signals = true;
  int drivers = 71;
  int refs = 10;
  int n_test = 5;
  double duration = 600.0;
  double t_h = 30.0;
  double t_p = 5.0;
  double dt = 0.1;
  double sigma = 0.6;
  double tau_noise = 15.0;
  double delay = 0.5;
  double min_advisory = 2.5;
  int population = 40;
  int generations = 40;
  int hidden = 64;
  int epochs = 16;
  int batch = 16;
  double lr = 1e-3;
  double dropout = 0.2;
  double tf = 0.5;
  std::size_t windows_per_epoch = 8192;
};

/// Runs the whole pipeline into one directory: route, advisory profiles,
/// fleet, sequence model, per-driver calibration, comparison. Each stage
/// gets an independent seed derived from the run seed.
void run_repro(const ReproOpts& o) {
  ensure_dir(o.out);
  const fs::path root(o.out);

  std::cerr << "[1/6] route\n";
  GenRouteOpts route_o;
  route_o.out = (root / "route.json").string();
  route_o.signals = o.signals;
  run_gen_route(route_o);

  std::cerr << "[2/6] advisory profiles\n";
  GenRefsOpts refs_o;
  refs_o.route = route_o.out;
  refs_o.out = (root / "refs").string();
  refs_o.count = o.refs;
  refs_o.dt = o.dt;
  refs_o.min_advisory = o.min_advisory;
  refs_o.seed = advisim::derive_seed(o.seed, 1);
  run_gen_refs(refs_o);

  std::cerr << "[3/6] fleet\n";
  GenDataOpts data_o;
  data_o.route = route_o.out;
  data_o.refs = (fs::path(refs_o.out) / "refs_manifest.json").string();
  data_o.out = (root / "data").string();
  data_o.drivers = o.drivers;
  data_o.duration = o.duration;
  data_o.dt = o.dt;
  data_o.sigma = o.sigma;
  data_o.tau_noise = o.tau_noise;
  data_o.delay = o.delay;
  data_o.seed = advisim::derive_seed(o.seed, 2);
  run_gen_data(data_o);

  std::cerr << "[4/6] sequence model\n";
  TrainOpts train_o;
  train_o.data = (fs::path(data_o.out) / "data_manifest.json").string();
  train_o.out = (root / "model").string();
  train_o.t_h = o.t_h;
  train_o.t_p = o.t_p;
  train_o.n_test = o.n_test;
  train_o.split_seed = advisim::derive_seed(o.seed, 3);
  train_o.seed = advisim::derive_seed(o.seed, 4);
  train_o.epochs = o.epochs;
  train_o.hidden = o.hidden;
  train_o.batch = o.batch;
  train_o.lr = o.lr;
  train_o.dropout = o.dropout;
  train_o.tf = o.tf;
  train_o.windows_per_epoch = o.windows_per_epoch;
  run_train(train_o);

  std::cerr << "[5/6] calibrating drivers\n";
  CalibrateOpts cal_o;
  cal_o.data = train_o.data;
  cal_o.route = route_o.out;
  cal_o.out = (root / "calib").string();
  cal_o.population = o.population;
  cal_o.generations = o.generations;
  cal_o.seed = advisim::derive_seed(o.seed, 5);
  run_calibrate(cal_o);

  std::cerr << "[6/6] comparison\n";
  CompareOpts cmp_o;
  cmp_o.model = (fs::path(train_o.out) / "model.ckpt").string();
  cmp_o.data = train_o.data;
  cmp_o.split = (fs::path(train_o.out) / "split.json").string();
  cmp_o.calibrations = (fs::path(cal_o.out) / "calibrations.json").string();
  cmp_o.route = route_o.out;
  cmp_o.out = (root / "compare").string();
  run_compare(cmp_o);

  json manifest;
  manifest["kind"] = "repro";
  manifest["seed"] = o.seed;
  manifest["signals"] = o.signals;
  manifest["drivers"] = o.drivers;
  manifest["refs"] = o.refs;
  manifest["n_test"] = o.n_test;
  manifest["duration"] = o.duration;
  manifest["window"] = {{"t_h", o.t_h}, {"t_p", o.t_p}, {"dt", o.dt}};
  manifest["noise"] = {{"sigma_a", o.sigma},
                       {"tau_noise", o.tau_noise},
                       {"perception_delay", o.delay}};
  manifest["min_advisory"] = o.min_advisory;
  manifest["ga"] = {{"population", o.population},
                    {"generations", o.generations},
                    {"seed", cal_o.seed}};
  manifest["training"] = {{"hidden", o.hidden},
                          {"epochs", o.epochs},
                          {"batch", o.batch},
                          {"learning_rate", o.lr},
                          {"dropout", o.dropout},
                          {"teacher_forcing", o.tf},
                          {"windows_per_epoch", o.windows_per_epoch},
                          {"split_seed", train_o.split_seed},
                          {"seed", train_o.seed}};
  write_manifest(root / "repro_manifest.json", manifest);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"advisim: synthetic driver-behavior pipeline"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from an INI or TOML file");
  app.set_version_flag("--version", "advisim 0.1.0");
  app.footer(
      "Exit codes:\n"
      "  0  success\n"
      "  2  usage error (unknown flag or malformed command line)\n"
      "  3  a required input file does not exist\n"
      "  4  invalid option value or configuration\n"
      "  5  pipeline stage failed (simulation, calibration or training)\n"
      "  6  malformed input file or filesystem write failure");

  auto route_o = std::make_shared<GenRouteOpts>();
  CLI::App* gen_route =
      app.add_subcommand("gen-route", "Write the built-in route map as JSON");
  gen_route->add_option("--out", route_o->out, "Output route path")
      ->capture_default_str();
  gen_route->add_flag("--signals", route_o->signals,
                      "Run the five stops as traffic lights");
  gen_route->callback([route_o] { run_gen_route(*route_o); });

  auto refs_o = std::make_shared<GenRefsOpts>();
  CLI::App* gen_refs = app.add_subcommand(
      "gen-refs", "Generate advisory speed profiles over a route");
  gen_refs->add_option("--route", refs_o->route, "Route JSON")->required();
  gen_refs->add_option("--out", refs_o->out, "Output directory")
      ->capture_default_str();
  gen_refs->add_option("--count", refs_o->count, "Number of profiles")
      ->capture_default_str();
  gen_refs->add_option("--dt", refs_o->dt, "Profile time step, s")
      ->capture_default_str();
  gen_refs->add_option("--min-advisory", refs_o->min_advisory,
                       "Lowest published advisory speed, m/s")
      ->capture_default_str();
  gen_refs->add_option("--seed", refs_o->seed, "Base RNG seed")
      ->capture_default_str();
  gen_refs->callback([refs_o] { run_gen_refs(*refs_o); });

  auto data_o = std::make_shared<GenDataOpts>();
  CLI::App* gen_data = app.add_subcommand(
      "gen-data", "Simulate a fleet of noisy drivers following advisories");
  gen_data->add_option("--route", data_o->route, "Route JSON")->required();
  gen_data->add_option("--refs", data_o->refs, "Advisory manifest")->required();
  gen_data->add_option("--out", data_o->out, "Output directory")
      ->capture_default_str();
  gen_data->add_option("--drivers", data_o->drivers, "Fleet size")
      ->capture_default_str();
  gen_data->add_option("--duration", data_o->duration, "Trace length, s")
      ->capture_default_str();
  gen_data->add_option("--dt", data_o->dt, "Simulation time step, s")
      ->capture_default_str();
  gen_data->add_option("--sigma", data_o->sigma, "Accel noise std, m/s^2")
      ->capture_default_str();
  gen_data->add_option("--tau-noise", data_o->tau_noise,
                       "Noise correlation time, s")
      ->capture_default_str();
  gen_data->add_option("--delay", data_o->delay, "Perception delay, s")
      ->capture_default_str();
  gen_data->add_option("--seed", data_o->seed, "Base RNG seed")
      ->capture_default_str();
  gen_data->callback([data_o] { run_gen_data(*data_o); });

  auto cal_o = std::make_shared<CalibrateOpts>();
  CLI::App* calibrate = app.add_subcommand(
      "calibrate", "Fit driver-model parameters to recorded traces");
  calibrate->add_option("--data", cal_o->data, "Fleet manifest")->required();
  calibrate->add_option("--route", cal_o->route, "Route JSON")->required();
  calibrate->add_option("--out", cal_o->out, "Output directory")
      ->capture_default_str();
  calibrate->add_option("--split", cal_o->split,
                        "Restrict to one side of a train/test split");
  calibrate->add_option("--subset", cal_o->subset,
                        "Which split side: train, test or all")
      ->capture_default_str();
  calibrate->add_option("--population", cal_o->population, "GA population")
      ->capture_default_str();
  calibrate->add_option("--generations", cal_o->generations, "GA generations")
      ->capture_default_str();
  calibrate->add_option("--seed", cal_o->seed, "Base RNG seed")
      ->capture_default_str();
  calibrate->callback([cal_o] { run_calibrate(*cal_o); });

  auto train_o = std::make_shared<TrainOpts>();
  CLI::App* train =
      app.add_subcommand("train", "Train the sequence predictor on a fleet");
  train->add_option("--data", train_o->data, "Fleet manifest")->required();
  train->add_option("--out", train_o->out, "Output directory")
      ->capture_default_str();
  train->add_option("--t-h", train_o->t_h, "History horizon, s")
      ->capture_default_str();
  train->add_option("--t-p", train_o->t_p, "Prediction horizon, s")
      ->capture_default_str();
  train->add_option("--n-test", train_o->n_test, "Drivers held out for test")
      ->capture_default_str();
  train->add_option("--split-seed", train_o->split_seed, "Split shuffle seed")
      ->capture_default_str();
  train->add_option("--seed", train_o->seed, "Training RNG seed")
      ->capture_default_str();
  train->add_option("--epochs", train_o->epochs, "Training epochs")
      ->capture_default_str();
  train->add_option("--hidden", train_o->hidden, "Hidden units per layer")
      ->capture_default_str();
  train->add_option("--batch", train_o->batch, "Minibatch size")
      ->capture_default_str();
  train->add_option("--lr", train_o->lr, "Adam learning rate")
      ->capture_default_str();
  train->add_option("--dropout", train_o->dropout, "Encoder dropout rate")
      ->capture_default_str();
  train->add_option("--tf", train_o->tf, "Initial teacher-forcing ratio")
      ->capture_default_str();
  train->add_option("--windows-per-epoch", train_o->windows_per_epoch,
                    "Windows visited per epoch, 0 = all")
      ->capture_default_str();
  train->callback([train_o] { run_train(*train_o); });

  auto pred_o = std::make_shared<PredictOpts>();
  CLI::App* predict = app.add_subcommand(
      "predict", "Predict velocity and tracking error from one history");
  predict->add_option("--model", pred_o->model, "Model checkpoint")->required();
  predict->add_option("--history", pred_o->history, "History trace CSV")
      ->required();
  predict->add_option("--out", pred_o->out, "Output CSV")
      ->capture_default_str();
  predict->callback([pred_o] { run_predict(*pred_o); });

  auto eval_o = std::make_shared<EvaluateOpts>();
  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "Score the sequence predictor on recorded traces");
  evaluate->add_option("--model", eval_o->model, "Model checkpoint")->required();
  evaluate->add_option("--data", eval_o->data, "Fleet manifest")->required();
  evaluate->add_option("--split", eval_o->split,
                       "Restrict to one side of a train/test split");
  evaluate->add_option("--subset", eval_o->subset,
                       "Which split side: train, test or all")
      ->capture_default_str();
  evaluate->add_option("--out", eval_o->out, "Output CSV")
      ->capture_default_str();
  evaluate->callback([eval_o] { run_evaluate(*eval_o); });

  auto cmp_o = std::make_shared<CompareOpts>();
  CLI::App* compare = app.add_subcommand(
      "compare", "Compare sequence predictor and fitted driver model");
  compare->add_option("--model", cmp_o->model, "Model checkpoint")->required();
  compare->add_option("--data", cmp_o->data, "Fleet manifest")->required();
  compare->add_option("--split", cmp_o->split, "Train/test split")->required();
  compare->add_option("--calibrations", cmp_o->calibrations,
                      "Calibration results")
      ->required();
  compare->add_option("--route", cmp_o->route, "Route JSON")->required();
  compare->add_option("--out", cmp_o->out, "Output directory")
      ->capture_default_str();
  compare->callback([cmp_o] { run_compare(*cmp_o); });

  auto repro_o = std::make_shared<ReproOpts>();
  CLI::App* repro = app.add_subcommand(
      "repro", "Run the full pipeline end to end into one directory");
  repro->add_option("--out", repro_o->out, "Output directory")
      ->capture_default_str();
  repro->add_option("--seed", repro_o->seed, "Run seed")->capture_default_str();
  repro->add_flag("--signals,!--stop-signs", repro_o->signals,
                  "Signalized or stop-sign intersections (default signals)");
  repro->add_option("--drivers", repro_o->drivers, "Fleet size")
      ->capture_default_str();
  repro->add_option("--refs", repro_o->refs, "Advisory profile count")
      ->capture_default_str();
  repro->add_option("--n-test", repro_o->n_test, "Drivers held out for test")
      ->capture_default_str();
  repro->add_option("--duration", repro_o->duration, "Trace length, s")
      ->capture_default_str();
  repro->add_option("--t-h", repro_o->t_h, "History horizon, s")
      ->capture_default_str();
  repro->add_option("--t-p", repro_o->t_p, "Prediction horizon, s")
      ->capture_default_str();
  repro->add_option("--dt", repro_o->dt, "Time step, s")->capture_default_str();
  repro->add_option("--sigma", repro_o->sigma, "Accel noise std, m/s^2")
      ->capture_default_str();
  repro->add_option("--tau-noise", repro_o->tau_noise,
                    "Noise correlation time, s")
      ->capture_default_str();
  repro->add_option("--delay", repro_o->delay, "Perception delay, s")
      ->capture_default_str();
  repro->add_option("--min-advisory", repro_o->min_advisory,
                    "Lowest published advisory speed, m/s")
      ->capture_default_str();
  repro->add_option("--population", repro_o->population, "GA population")
      ->capture_default_str();
  repro->add_option("--generations", repro_o->generations, "GA generations")
      ->capture_default_str();
  repro->add_option("--hidden", repro_o->hidden, "Hidden units per layer")
      ->capture_default_str();
  repro->add_option("--epochs", repro_o->epochs, "Training epochs")
      ->capture_default_str();
  repro->add_option("--batch", repro_o->batch, "Minibatch size")
      ->capture_default_str();
  repro->add_option("--lr", repro_o->lr, "Adam learning rate")
      ->capture_default_str();
  repro->add_option("--dropout", repro_o->dropout, "Encoder dropout rate")
      ->capture_default_str();
  repro->add_option("--tf", repro_o->tf, "Initial teacher-forcing ratio")
      ->capture_default_str();
  repro->add_option("--windows-per-epoch", repro_o->windows_per_epoch,
                    "Windows visited per epoch, 0 = all")
      ->capture_default_str();
  repro->callback([repro_o] { run_repro(*repro_o); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const MissingInputError& e) {
    std::cerr << "advisim: " << e.what() << "\n";
    return kExitMissingInput;
  } catch (const advisim::IoError& e) {
    std::cerr << "advisim: " << e.what() << "\n";
    return kExitIo;
  } catch (const advisim::ConfigError& e) {
    std::cerr << "advisim: " << e.what() << "\n";
    return kExitBadConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "advisim: " << e.what() << "\n";
    return kExitBadConfig;
  } catch (const std::domain_error& e) {
    std::cerr << "advisim: " << e.what() << "\n";
    return kExitBadConfig;
  } catch (const std::exception& e) {
    std::cerr << "advisim: " << e.what() << "\n";
    return kExitStageFailed;
  }
  return 0;
}

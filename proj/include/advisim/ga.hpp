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

#ifndef ADVISIM_GA_HPP
#define ADVISIM_GA_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "advisim/common.hpp"
#include "advisim/edm.hpp"
#include "advisim/scenario.hpp"
#include "advisim/synth.hpp"
#include "advisim/trace.hpp"

namespace advisim {

struct GaConfig {
  int population = 50;
  int generations = 60;
  double crossover_rate = 0.9;
  double mutation_rate = 0.15;
  double mutation_sigma_frac = 0.1;  // mutation std as a fraction of range
  int elitism = 2;
  std::uint64_t seed = 0;
  ParamBounds bounds;
  unsigned threads = 0;  // 0 = hardware count

  void validate() const {
    if (population < 4) throw ConfigError("population must be at least 4");
    if (generations < 0) throw ConfigError("generations must be non-negative");
    if (elitism < 0 || elitism >= population)
      throw ConfigError("elitism must be in [0, population)");
    auto rate_ok = [](double r) { return r >= 0.0 && r <= 1.0; };
    if (!rate_ok(crossover_rate) || !rate_ok(mutation_rate))
      throw ConfigError("rates must lie in [0, 1]");
    if (!(mutation_sigma_frac > 0.0))
      throw ConfigError("mutation_sigma_frac must be positive");
    bounds.validate();
  }
};

struct CalibrationResult {
  EdmParams best;
  double best_fitness = std::numeric_limits<double>::infinity();
  std::vector<double> history;  // best fitness after each generation
};

namespace ga_detail {

inline constexpr int kNumGenes = 5;

using Genome = std::array<double, kNumGenes>;

inline Genome to_genome(const EdmParams& p) {
  return {p.a, p.b, p.delta, p.theta0, p.s_brake};
}

inline EdmParams to_params(const Genome& g) {
  EdmParams p;
  p.a = g[0];
  p.b = g[1];
  p.delta = g[2];
  p.theta0 = g[3];
  p.s_brake = g[4];
  return p;
}

inline std::array<ParamRange, kNumGenes> ranges(const ParamBounds& b) {
  return {b.a, b.b, b.delta, b.theta0, b.s_brake};
}

}  // namespace ga_detail

/// Velocity RMSE of an EDM replay against a recorded trace. The replay
/// tracks the trace's own recorded advisory channel so the comparison is
/// about driver style, not route knowledge. Shorter replays are truncated
/// and penalized 0.1 m/s per missing second; any simulation failure maps
/// to +inf so the individual is culled rather than crashing the search.
inline double fitness(const EdmParams& params, const DriveTrace& target,
                      const RouteMap& route) {
  if (target.empty()) throw std::domain_error("empty calibration target");
  if (!(target.dt > 0.0)) throw std::domain_error("target trace lacks dt");

  ReferenceProfile advisory;
  advisory.dt = target.dt;
  advisory.v = target.v_ref;

  SimOptions opts;
  opts.v0 = target.v.front();
  opts.duration = target.duration();

  DriveTrace replay;
  try {
    replay = simulate_edm(params, route, VrSource::advisory(advisory),
                          target.dt, opts);
  } catch (const std::exception&) {
    return std::numeric_limits<double>::infinity();
  }

  const std::size_t n = std::min(replay.size(), target.size());
  if (n == 0) return std::numeric_limits<double>::infinity();
  double sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = replay.v[i] - target.v[i];
    sq += d * d;
  }
  const double rmse = std::sqrt(sq / static_cast<double>(n));
  const std::size_t missing =
      std::max(replay.size(), target.size()) - n;
  const double penalty =
      0.1 * static_cast<double>(missing) * target.dt;
  return rmse + penalty;
}

/// Genetic-algorithm search for the parameters that best replay a trace:
/// tournament selection (size 3), per-gene uniform crossover, Gaussian
/// mutation clipped to bounds, elitism. Deterministic under cfg.seed;
/// fitness evaluations within a generation run in parallel.
inline CalibrationResult calibrate(const DriveTrace& target,
                                   const RouteMap& route,
                                   const GaConfig& cfg) {
  using ga_detail::Genome;
  cfg.validate();
  if (target.empty()) throw std::domain_error("empty calibration target");

  const auto bounds = ga_detail::ranges(cfg.bounds);
  const auto pop_size = static_cast<std::size_t>(cfg.population);
  Rng rng(derive_seed(cfg.seed, 0x6a3));

  std::vector<Genome> pop(pop_size);
  for (auto& g : pop)
    for (int k = 0; k < ga_detail::kNumGenes; ++k)
      g[k] = rng.uniform(bounds[k].lo, bounds[k].hi);

  std::vector<double> fit(pop_size);
  auto evaluate = [&](const std::vector<Genome>& genomes,
                      std::vector<double>& out) {
    parallel_for(
        genomes.size(),
        [&](std::size_t i) {
          out[i] = fitness(ga_detail::to_params(genomes[i]), target, route);
        },
        cfg.threads);
  };
  evaluate(pop, fit);

  auto best_index = [&]() {
    std::size_t best = 0;
    for (std::size_t i = 1; i < pop_size; ++i)
      if (fit[i] < fit[best]) best = i;
    return best;
  };

  // all-time champion; monotone by construction
  Genome champion = pop[best_index()];
  double champion_fit = fit[best_index()];

  CalibrationResult result;
  result.history.reserve(static_cast<std::size_t>(cfg.generations) + 1);
  result.history.push_back(champion_fit);

  auto tournament = [&]() -> const Genome& {
    std::size_t best = rng.uniform_index(pop_size);
    for (int k = 1; k < 3; ++k) {
      const std::size_t cand = rng.uniform_index(pop_size);
      if (fit[cand] < fit[best]) best = cand;
    }
    return pop[best];
  };

  for (int gen = 0; gen < cfg.generations; ++gen) {
    // elites carry over unchanged
    std::vector<std::size_t> rank(pop_size);
    for (std::size_t i = 0; i < pop_size; ++i) rank[i] = i;
    std::sort(rank.begin(), rank.end(),
              [&](std::size_t a, std::size_t b) { return fit[a] < fit[b]; });

    std::vector<Genome> next;
    next.reserve(pop_size);
    for (int e = 0; e < cfg.elitism; ++e)
      next.push_back(pop[rank[static_cast<std::size_t>(e)]]);

    while (next.size() < pop_size) {
      Genome child_a = tournament();
      Genome child_b = tournament();
      if (rng.bernoulli(cfg.crossover_rate)) {
        for (int k = 0; k < ga_detail::kNumGenes; ++k)
          if (rng.bernoulli(0.5)) std::swap(child_a[k], child_b[k]);
      }
      for (Genome* child : {&child_a, &child_b}) {
        if (next.size() >= pop_size) break;
        for (int k = 0; k < ga_detail::kNumGenes; ++k) {
          if (rng.bernoulli(cfg.mutation_rate)) {
            const double sigma = cfg.mutation_sigma_frac * bounds[k].width();
            (*child)[k] = std::clamp((*child)[k] + rng.normal(0.0, sigma),
                                     bounds[k].lo, bounds[k].hi);
          }
        }
        next.push_back(*child);
      }
    }

    pop = std::move(next);
    evaluate(pop, fit);
    const std::size_t bi = best_index();
    if (fit[bi] < champion_fit) {
      champion_fit = fit[bi];
      champion = pop[bi];
    }
    result.history.push_back(champion_fit);
  }

  result.best = ga_detail::to_params(champion);
  result.best_fitness = champion_fit;
  return result;
}

/// Per-parameter distribution over a set of calibrations: mean, population
/// std and a fixed 10-bin histogram over each parameter's bound range.
struct ParamDistribution {
  std::string name;
  double mean = 0.0;
  double stddev = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  std::array<std::size_t, 10> bins{};
};

inline std::vector<ParamDistribution> population_summary(
    const std::vector<CalibrationResult>& results,
    const ParamBounds& bounds = {}) {
  if (results.empty())
    throw std::invalid_argument("population_summary needs at least one result");
  const auto ranges = ga_detail::ranges(bounds);
  const std::array<const char*, ga_detail::kNumGenes> names = {
      "a", "b", "delta", "theta0", "s_brake"};

  std::vector<ParamDistribution> out;
  for (int k = 0; k < ga_detail::kNumGenes; ++k) {
    ParamDistribution dist;
    dist.name = names[static_cast<std::size_t>(k)];
    dist.lo = ranges[k].lo;
    dist.hi = ranges[k].hi;
    double sum = 0.0;
    for (const auto& r : results) sum += ga_detail::to_genome(r.best)[k];
    dist.mean = sum / static_cast<double>(results.size());
    double sq = 0.0;
    for (const auto& r : results) {
      const double d = ga_detail::to_genome(r.best)[k] - dist.mean;
      sq += d * d;
    }
    dist.stddev = std::sqrt(sq / static_cast<double>(results.size()));
    const double width = dist.hi - dist.lo;
    for (const auto& r : results) {
      const double x = ga_detail::to_genome(r.best)[k];
      int bin = width > 0.0
                    ? static_cast<int>(std::floor((x - dist.lo) / width * 10.0))
                    : 0;
      bin = std::clamp(bin, 0, 9);
      ++dist.bins[static_cast<std::size_t>(bin)];
    }
    out.push_back(dist);
  }
  return out;
}

}  // namespace advisim

#endif  // ADVISIM_GA_HPP

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

#ifndef ADVISIM_SYNTH_HPP
#define ADVISIM_SYNTH_HPP

#include <cmath>
#include <cstdint>
#include <string>

#include "advisim/common.hpp"
#include "advisim/edm.hpp"
#include "advisim/scenario.hpp"
#include "advisim/trace.hpp"

namespace advisim {

/// Closed interval a parameter is sampled from and clipped to.
struct ParamRange {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
};

/// Sampling and calibration ranges for the five driver parameters.
struct ParamBounds {
  ParamRange a{0.8, 2.5};
  ParamRange b{1.0, 3.5};
  ParamRange delta{1.0, 6.0};
  ParamRange theta0{0.0, 2.0};
  ParamRange s_brake{20.0, 80.0};

  void validate() const {
    auto check = [](const ParamRange& r, const char* name) {
      if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo > r.hi)
        throw ConfigError(std::string("inverted bounds for ") + name);
    };
    check(a, "a");
    check(b, "b");
    check(delta, "delta");
    check(theta0, "theta0");
    check(s_brake, "s_brake");
    if (!(a.lo > 0.0) || !(b.lo > 0.0) || !(delta.lo > 0.0) ||
        !(s_brake.lo > 0.0) || theta0.lo < 0.0)
      throw ConfigError("parameter bounds allow non-physical values");
  }
};

/// Stochastic ingredients that turn the deterministic model into a
/// synthetic human driver.
struct NoiseConfig {
  double sigma_a = 0.3;          // accel disturbance std, m/s^2
  double tau_noise = 3.0;        // disturbance correlation time, s
  double perception_delay = 0.5; // advisory reaction lag, s
  std::uint64_t seed = 0;

  void validate() const {
    if (!(sigma_a >= 0.0) || !std::isfinite(sigma_a))
      throw ConfigError("sigma_a must be non-negative");
    if (!(tau_noise > 0.0) || !std::isfinite(tau_noise))
      throw ConfigError("tau_noise must be positive");
    if (!(perception_delay >= 0.0) || !std::isfinite(perception_delay))
      throw ConfigError("perception_delay must be non-negative");
  }
};

/// Uniform parameter draw within bounds. A fresh generator is seeded per
/// call so a (seed, bounds) pair always maps to the same parameters.
inline EdmParams sample_driver_params(std::uint64_t rng_seed,
                                      const ParamBounds& bounds = {}) {
  bounds.validate();
  Rng rng(rng_seed);
  EdmParams p;
  p.a = rng.uniform(bounds.a.lo, bounds.a.hi);
  p.b = rng.uniform(bounds.b.lo, bounds.b.hi);
  p.delta = rng.uniform(bounds.delta.lo, bounds.delta.hi);
  p.theta0 = rng.uniform(bounds.theta0.lo, bounds.theta0.hi);
  p.s_brake = rng.uniform(bounds.s_brake.lo, bounds.s_brake.hi);
  return p;
}

/// Simulates an imperfect human driver following a displayed advisory:
/// the deterministic model plus correlated acceleration noise and a
/// perception delay. noise.perception_delay supersedes the one in opts.
/// With sigma_a = 0 and perception_delay = 0 the result is bit-identical
/// to simulate_edm tracking the same advisory.
inline DriveTrace simulate_human(const EdmParams& params,
                                 const NoiseConfig& noise,
                                 const ReferenceProfile& advisory,
                                 const RouteMap& route, double dt,
                                 const SimOptions& base_opts = {},
                                 SimOutcome* outcome = nullptr) {
  noise.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (advisory.v.empty())
    throw std::invalid_argument("advisory profile is empty");
  const double ratio = advisory.dt >= dt ? advisory.dt / dt : dt / advisory.dt;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 || !(ratio >= 1.0))
    throw ConfigError("advisory dt is not an integer multiple of sim dt");

  SimOptions opts = base_opts;
  opts.perception_delay = noise.perception_delay;

  Rng rng(noise.seed);
  AccelNoise accel;
  accel.sigma = noise.sigma_a;
  accel.tau = noise.tau_noise;
  accel.rng = &rng;
  return simulate_edm(params, route, VrSource::advisory(advisory), dt, opts,
                      accel, outcome);
}

}  // namespace advisim

#endif  // ADVISIM_SYNTH_HPP

// Copyright 2026 The ctmc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CTMC_CIS_CIS_HPP
#define CTMC_CIS_CIS_HPP

#include <ctmc/cis/proposal.hpp>
#include <ctmc/cis/rho.hpp>
#include <ctmc/errors.hpp>
#include <ctmc/linalg.hpp>
#include <ctmc/rng.hpp>

#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace ctmc::cis {

/// CIS state: value y at the last event, signed weight w, time s since that event, clock t.
struct CisParticle {
  Vector y;
  double w = 1.0;
  double s = 0.0;
  double t = 0.0;
};

/// Event rate of the CIS process, a function of the value at the last event.
struct EventRate {
  std::function<double(const Vector& y)> rate;
  std::string name;
};

inline EventRate constant_event_rate(double rate) {
  return {[rate](const Vector&) { return rate; }, "constant"};
}

/// a + b |y - x_hat|^2, e.g. 2n + 4n^2 (y - x_hat)^2 for control-variate SCALE.
inline EventRate anchored_quadratic_rate(double a, double b, Vector x_hat) {
  return {[a, b, x_hat = std::move(x_hat)](const Vector& y) { return a + b * (y - x_hat).squaredNorm(); },
          "anchored-quadratic"};
}

struct CisCounters {
  std::size_t events = 0;
  std::size_t data_accesses = 0;
  std::size_t sign_changes = 0;
};

/// Advances a particle to its next event or to `horizon`, whichever comes first.
/**
 * Between events the rate is fixed by the current y, so the gap is exponential. At an event
 * y' ~ q_s(.|y) and w <- w (1 + rho(y', y, s) / rate).
 */
inline CisParticle cis_step(CisParticle particle, const Proposal& proposal, const RhoFn& rho, const EventRate& rate,
                            double horizon, RngStream& rng, CisCounters* counters = nullptr) {
  const double lambda = rate.rate(particle.y);
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw ConfigError{"CIS event rate must be positive and finite, got " + std::to_string(lambda)};
  }
  const double gap = rng.exponential() / lambda;
  if (particle.t + gap >= horizon) {
    particle.s += horizon - particle.t;
    particle.t = horizon;
    return particle;
  }
  particle.t += gap;
  particle.s += gap;
  Vector next = sample_proposal(proposal, particle.s, particle.y, rng);
  const double factor = 1.0 + rho.evaluate(next, particle.y, particle.s, rng) / lambda;
  const double before = particle.w;
  particle.w *= factor;
  particle.y = std::move(next);
  particle.s = 0.0;
  if (counters) {
    ++counters->events;
    counters->data_accesses += rho.accesses;
    if ((before < 0.0) != (particle.w < 0.0)) ++counters->sign_changes;
  }
  return particle;
}

/// Runs cis_step until the particle reaches `horizon`.
inline CisParticle propagate(CisParticle particle, const Proposal& proposal, const RhoFn& rho, const EventRate& rate,
                             double horizon, RngStream& rng, CisCounters* counters = nullptr) {
  while (particle.t < horizon) {
    particle = cis_step(std::move(particle), proposal, rho, rate, horizon, rng, counters);
  }
  return particle;
}

/// Draws X_t ~ q_s(.|y), the value the weight applies to; y itself when no time has elapsed.
inline Vector observe(const CisParticle& particle, const Proposal& proposal, RngStream& rng) {
  if (particle.s <= 0.0) {
    return particle.y;
  }
  return sample_proposal(proposal, particle.s, particle.y, rng);
}

struct WeightedDraw {
  double t = 0.0;
  Vector x;
  double w = 1.0;
};

struct CisRun {
  CisParticle particle;
  WeightedDraw final_draw;
  /// (t, y, w) after every event, starting with the initial state.
  std::vector<WeightedDraw> trajectory;
  /// rho at the starting value, evaluated with s = T.
  double initial_rho = 0.0;
  CisCounters counters;
};

/// A single CIS particle on [0, T].
inline CisRun run_cis(const Vector& x0, const Proposal& proposal, const RhoFn& rho, const EventRate& rate,
                      double horizon, RngStream& rng, bool record_trajectory = true) {
  if (!(horizon > 0.0)) {
    throw ContractViolation{"run_cis: horizon must be positive"};
  }
  CisRun run;
  run.particle = CisParticle{x0, 1.0, 0.0, 0.0};
  run.initial_rho = rho.evaluate(x0, x0, horizon, rng);
  run.counters.data_accesses = rho.accesses;
  if (record_trajectory) run.trajectory.push_back({0.0, x0, 1.0});
  while (run.particle.t < horizon) {
    const std::size_t events = run.counters.events;
    run.particle = cis_step(std::move(run.particle), proposal, rho, rate, horizon, rng, &run.counters);
    if (record_trajectory && run.counters.events != events) {
      run.trajectory.push_back({run.particle.t, run.particle.y, run.particle.w});
    }
  }
  run.final_draw = {horizon, observe(run.particle, proposal, rng), run.particle.w};
  return run;
}

/// SCALE with a Brownian proposal; `rho` selects the exact, sub-sampled or control-variate rate.
inline CisRun run_cis_scale(const Vector& x0, const RhoFn& rho, const EventRate& rate, double horizon, RngStream& rng,
                            bool record_trajectory = true) {
  return run_cis(x0, BrownianProposal{}, rho, rate, horizon, rng, record_trajectory);
}

}  // namespace ctmc::cis

#endif  // CTMC_CIS_CIS_HPP

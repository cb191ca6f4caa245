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

#ifndef CTMC_CIS_SMC_HPP
#define CTMC_CIS_SMC_HPP

#include <ctmc/cis/cis.hpp>
#include <ctmc/errors.hpp>
#include <ctmc/linalg.hpp>
#include <ctmc/rng.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <sstream>
#include <vector>

namespace ctmc::cis {

struct ParticleSystem {
  std::vector<CisParticle> particles;

  [[nodiscard]] std::size_t size() const { return particles.size(); }
  [[nodiscard]] std::vector<double> weights() const {
    std::vector<double> w;
    w.reserve(particles.size());
    for (const auto& p : particles) w.push_back(p.w);
    return w;
  }
};

/// (sum |w|)^2 / sum w^2; zero for an all-zero system.
inline double signed_ess(const std::vector<double>& weights) {
  double largest = 0.0;
  for (double w : weights) largest = std::max(largest, std::abs(w));
  if (!(largest > 0.0)) return 0.0;
  double abs_sum = 0.0;
  double sq_sum = 0.0;
  for (double w : weights) {
    const double r = w / largest;
    abs_sum += std::abs(r);
    sq_sum += r * r;
  }
  return sq_sum > 0.0 ? abs_sum * abs_sum / sq_sum : 0.0;
}

/// Multinomial resampling with probabilities proportional to |w|.
/**
 * Every offspring takes its ancestor's state and the weight sign(w_ancestor) * mean_j |w_j|, so
 * signs survive and sum_i w_i f(x_i) is unbiased.
 */
inline ParticleSystem resample(const ParticleSystem& system, RngStream& rng) {
  const std::size_t n = system.size();
  std::vector<double> cumulative(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total += std::abs(system.particles[i].w);
    cumulative[i] = total;
  }
  if (!(total > 0.0) || !std::isfinite(total)) {
    std::ostringstream os;
    os << "resample: sum of |w| is " << total << " over " << n << " particles";
    throw DegenerateSystemError{os.str()};
  }
  const double mean_abs = total / static_cast<double>(n);
  ParticleSystem out;
  out.particles.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& ancestor = system.particles[rng.index_from_cumulative(cumulative)];
    CisParticle child = ancestor;
    child.w = std::copysign(mean_abs, ancestor.w);
    out.particles.push_back(std::move(child));
  }
  return out;
}

struct SmcConfig {
  std::size_t particles = 200;
  double h = 1.0;
  std::size_t steps = 100;
  double ess_threshold = 100.0;
};

/// Weighted draws (x_i, w_i) at time t, taken before any resampling at t.
struct SmcSnapshot {
  double t = 0.0;
  std::vector<Vector> x;
  std::vector<double> w;
  double ess = 0.0;
  bool resampled = false;
};

struct SmcResult {
  std::vector<SmcSnapshot> snapshots;
  ParticleSystem final_system;
  CisCounters counters;
  std::size_t resamplings = 0;

  /// Share of (particle, snapshot) pairs with a negative weight.
  [[nodiscard]] double negative_weight_fraction() const {
    std::size_t negative = 0;
    std::size_t total = 0;
    for (const auto& s : snapshots) {
      for (double w : s.w) negative += w < 0.0;
      total += s.w.size();
    }
    return total == 0 ? 0.0 : static_cast<double>(negative) / static_cast<double>(total);
  }
};

/// Continuous-time SMC: propagate every particle by CIS over [kh, (k+1)h], then resample if ESS < threshold.
/**
 * Particle i uses the sub-stream k N + i of `rng` during interval k, so results do not depend on
 * the order particles are propagated in. Resampling draws from `rng` itself.
 */
inline SmcResult run_smc(const SmcConfig& config, const std::function<Vector(RngStream&)>& initial,
                         const Proposal& proposal, const RhoFn& rho, const EventRate& rate, RngStream& rng) {
  if (config.particles < 2) {
    throw ConfigError{"run_smc: need at least two particles"};
  }
  if (!(config.h > 0.0) || config.steps == 0) {
    throw ConfigError{"run_smc: need h > 0 and at least one step"};
  }
  const std::size_t n = config.particles;
  SmcResult result;
  ParticleSystem system;
  system.particles.reserve(n);
  for (std::size_t i = 0; i < n; ++i) system.particles.push_back({initial(rng), 1.0, 0.0, 0.0});
  {
    SmcSnapshot first{0.0, {}, system.weights(), static_cast<double>(n), false};
    for (const auto& p : system.particles) first.x.push_back(p.y);
    result.snapshots.push_back(std::move(first));
  }
  for (std::size_t k = 0; k < config.steps; ++k) {
    const double until = static_cast<double>(k + 1) * config.h;
    SmcSnapshot snap;
    snap.t = until;
    for (std::size_t i = 0; i < n; ++i) {
      RngStream local = rng.substream(k * n + i);
      auto& p = system.particles[i];
      p = propagate(std::move(p), proposal, rho, rate, until, local, &result.counters);
      if (!std::isfinite(p.w)) {
        std::ostringstream os;
        os << "run_smc: particle " << i << " has weight " << p.w << " at t=" << until;
        throw DegenerateSystemError{os.str()};
      }
      snap.x.push_back(observe(p, proposal, local));
      snap.w.push_back(p.w);
    }
    snap.ess = signed_ess(snap.w);
    if (snap.ess < config.ess_threshold) {
      try {
        system = resample(system, rng);
      } catch (const DegenerateSystemError& e) {
        throw DegenerateSystemError{std::string{e.what()} + " at t=" + std::to_string(until)};
      }
      snap.resampled = true;
      ++result.resamplings;
    }
    result.snapshots.push_back(std::move(snap));
  }
  result.final_system = std::move(system);
  return result;
}

/// One JSON object per snapshot: {"t", "x", "w"}; x is a flat array in one dimension.
inline void write_snapshots_jsonl(std::ostream& os, const std::vector<SmcSnapshot>& snapshots) {
  for (const auto& s : snapshots) {
    nlohmann::json xs = nlohmann::json::array();
    for (const auto& x : s.x) {
      if (x.size() == 1) {
        xs.push_back(x[0]);
      } else {
        xs.push_back(to_std(x));
      }
    }
    os << nlohmann::json{{"t", s.t}, {"x", xs}, {"w", s.w}}.dump() << '\n';
  }
}

}  // namespace ctmc::cis

#endif  // CTMC_CIS_SMC_HPP

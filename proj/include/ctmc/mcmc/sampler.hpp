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

#ifndef CTMC_MCMC_SAMPLER_HPP
#define CTMC_MCMC_SAMPLER_HPP

#include <ctmc/errors.hpp>
#include <ctmc/linalg.hpp>
#include <ctmc/mcmc/bound_policy.hpp>
#include <ctmc/mcmc/estimators.hpp>
#include <ctmc/mcmc/velocity.hpp>
#include <ctmc/pdp/simulate.hpp>
#include <ctmc/rng.hpp>
#include <ctmc/targets/factorized.hpp>

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace ctmc::mcmc {

/// Velocity negation at every event, plus optional refreshment.
struct PureReflection {
  double refresh_rate = 0.0;
};

/// Bouncy Particle Sampler: reflection in the gradient hyperplane, plus refreshment.
struct Bps {
  double refresh_rate = 1.0;
};

/// Zig-Zag: one switching rate per coordinate, velocities in {-1, +1}^d.
struct ZigZag {};

using SamplerKind = std::variant<PureReflection, Bps, ZigZag>;

inline std::string sampler_name(const SamplerKind& kind) {
  constexpr const char* names[] = {"reflect", "bps", "zigzag"};
  return names[kind.index()];
}

struct SamplerOptions {
  /// Constant added to every switching rate.
  double epsilon = 0.0;
};

struct CostCounters {
  std::size_t proposals = 0;
  std::size_t events = 0;
  std::size_t refresh_proposals = 0;
  std::size_t refreshes = 0;
  std::size_t factor_evals = 0;
};

struct CtmcmcResult {
  pdp::Skeleton skeleton;
  CostCounters cost;
};

/// Rejects configurations that cannot target the posterior.
inline void validate_sampler(const SamplerKind& kind, const RateEstimator& estimator, const BoundPolicy& bound,
                             const Vector& x0, const Vector& v0, const SamplerOptions& options = {}) {
  if (x0.size() == 0 || x0.size() != v0.size()) {
    throw ConfigError{"initial position and velocity must have the same positive dimension"};
  }
  if (!(options.epsilon >= 0.0)) {
    throw ConfigError{"epsilon must be non-negative"};
  }
  if (bound.exact_only && !std::holds_alternative<ExactEstimator>(estimator)) {
    throw ConfigError{"bound '" + bound.name + "' is only valid with the exact estimator"};
  }
  if (!bound.envelope) {
    throw ConfigError{"bound policy has no envelope"};
  }
  if (const auto* r = std::get_if<PureReflection>(&kind)) {
    if (!(r->refresh_rate >= 0.0)) {
      throw ConfigError{"refresh rate must be non-negative"};
    }
    if (x0.size() > 1 && r->refresh_rate == 0.0) {
      throw ConfigError{"this process would be reducible: pure reflection in d > 1 needs a positive refresh rate"};
    }
  }
  if (const auto* b = std::get_if<Bps>(&kind); b && !(b->refresh_rate > 0.0)) {
    throw ConfigError{"the bouncy particle sampler needs a positive refresh rate"};
  }
  if (std::holds_alternative<ZigZag>(kind)) {
    for (Eigen::Index k = 0; k < v0.size(); ++k) {
      if (std::abs(v0[k]) != 1.0) {
        throw ConfigError{"Zig-Zag velocities must have entries in {-1, +1}"};
      }
    }
  } else if (std::abs(v0.norm() - 1.0) > 1e-12) {
    throw ConfigError{"initial velocity must have unit speed"};
  }
}

/// Continuous-time MCMC with exact or sub-sampled switching rates.
/**
 * Each putative event draws a fresh realization u of the gradient estimator at the proposed
 * position and accepts with probability max{0, v . u} / envelope. BPS reflects in the hyperplane
 * orthogonal to that same u. Zig-Zag runs one thinning stream per coordinate.
 */
template <targets::FactorizedTarget T>
CtmcmcResult run_ctmcmc(const SamplerKind& kind, const RateEstimator& estimator, const BoundPolicy& bound,
                        const T& target, const Vector& x0, const Vector& v0, double horizon, RngStream& rng,
                        const SamplerOptions& options = {}) {
  validate_sampler(kind, estimator, bound, x0, v0, options);
  if (static_cast<std::size_t>(x0.size()) != target.dimension()) {
    throw ConfigError{"initial position does not match the target dimension"};
  }
  const std::size_t d = target.dimension();
  const std::size_t cost_per_estimate = factor_evaluations(estimator, target.factor_count());
  std::size_t factor_evals = 0;
  GradientEstimate last;
  const double epsilon = options.epsilon;

  const auto estimate_at = [&](const pdp::PdpState& anchor, double s, RngStream& r) -> const GradientEstimate& {
    const Vector x = anchor.x + s * anchor.v;
    if (bound.domain && !bound.domain->contains(x)) {
      std::ostringstream os;
      os << "position left the validity domain [" << bound.domain->lo << ", " << bound.domain->hi << "] of bound '"
         << bound.name << "'";
      throw InvalidBoundError{anchor.t + s, std::numeric_limits<double>::quiet_NaN(),
                              std::numeric_limits<double>::quiet_NaN(), os.str()};
    }
    last = estimate_gradient(estimator, target, x, r);
    factor_evals += cost_per_estimate;
    return last;
  };
  const auto envelope_for = [&bound, epsilon](std::optional<std::size_t> coordinate) {
    return [&bound, epsilon, coordinate](const pdp::PdpState& anchor, double remaining) {
      auto env = bound.envelope(anchor, coordinate, remaining);
      return epsilon > 0.0 ? env.plus(epsilon) : env;
    };
  };

  std::vector<pdp::EventChannel> channels;
  if (std::holds_alternative<ZigZag>(kind)) {
    for (std::size_t i = 0; i < d; ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      channels.push_back({[&, k](const pdp::PdpState& a, double s, RngStream& r) {
                            return std::max(0.0, a.v[k] * estimate_at(a, s, r).u[k]) + epsilon;
                          },
                          envelope_for(i),
                          [i](const pdp::PdpState& at, RngStream&) {
                            return pdp::Transition{at.x, zigzag_flip(at.v, i), pdp::EventKind::flip, static_cast<int>(i)};
                          },
                          "flip(" + std::to_string(i) + ")"});
    }
  } else {
    const bool bps = std::holds_alternative<Bps>(kind);
    channels.push_back({[&](const pdp::PdpState& a, double s, RngStream& r) {
                          return random_rate(estimate_at(a, s, r), a.v) + epsilon;
                        },
                        envelope_for(std::nullopt),
                        [&, bps](const pdp::PdpState& at, RngStream&) {
                          // A zero estimate can only fire through epsilon; negation is used there.
                          if (bps && last.u.squaredNorm() > 0.0) {
                            return pdp::Transition{at.x, bps_flip(last.u, at.v), pdp::EventKind::reflection};
                          }
                          return pdp::Transition{at.x, -at.v, pdp::EventKind::reflection};
                        },
                        "reflection"});
  }

  double refresh_rate = 0.0;
  if (const auto* r = std::get_if<PureReflection>(&kind)) refresh_rate = r->refresh_rate;
  if (const auto* b = std::get_if<Bps>(&kind)) refresh_rate = b->refresh_rate;
  const std::size_t switch_channels = channels.size();
  if (refresh_rate > 0.0) {
    channels.push_back({[refresh_rate](const pdp::PdpState&, double, RngStream&) { return refresh_rate; },
                        [refresh_rate](const pdp::PdpState&, double remaining) {
                          return pdp::RateBound::constant(refresh_rate, remaining);
                        },
                        [d](const pdp::PdpState& at, RngStream& r) {
                          return pdp::Transition{at.x, uniform_unit_vector(d, r), pdp::EventKind::refresh};
                        },
                        "refresh"});
  }

  auto sim = pdp::simulate_pdp(pdp::PdpState{0.0, x0, v0}, channels, horizon, rng);
  CtmcmcResult result{std::move(sim.skeleton), {}};
  for (std::size_t k = 0; k < sim.counters.size(); ++k) {
    if (k < switch_channels) {
      result.cost.proposals += sim.counters[k].proposals;
      result.cost.events += sim.counters[k].events;
    } else {
      result.cost.refresh_proposals += sim.counters[k].proposals;
      result.cost.refreshes += sim.counters[k].events;
    }
  }
  result.cost.factor_evals = factor_evals;
  return result;
}

}  // namespace ctmc::mcmc

#endif  // CTMC_MCMC_SAMPLER_HPP

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

#ifndef CTMC_PDP_EVENT_TIME_HPP
#define CTMC_PDP_EVENT_TIME_HPP

#include <ctmc/errors.hpp>
#include <ctmc/pdp/rate_bound.hpp>
#include <ctmc/rng.hpp>

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>

namespace ctmc::pdp {

/// Successive points of a Poisson process whose intensity is a piecewise-linear envelope.
/**
 * Each call to `next` consumes one Exp(1) draw and inverts the integrated envelope segment by
 * segment in closed form. When a decreasing segment runs out of mass before the budget is
 * spent, the remaining budget carries over to the following segment.
 */
class PoissonProposals {
 public:
  explicit PoissonProposals(RateBound bound) : bound_{std::move(bound)} {}

  /// Time of the next proposal, or nothing if the envelope has too little mass left.
  std::optional<double> next(RngStream& rng) {
    double budget = rng.exponential();
    const auto& segments = bound_.segments();
    while (segment_ < segments.size()) {
      const auto& seg = segments[segment_];
      const double r0 = seg.value(now_);
      if (std::isinf(seg.end)) {
        if (r0 <= 0.0 && seg.b <= 0.0) {
          return exhausted();
        }
        now_ += solve(r0, seg.b, budget);
        return now_;
      }
      const double available = seg.mass(now_, seg.end);
      if (budget <= available && available > 0.0) {
        now_ = std::min(seg.end, now_ + solve(r0, seg.b, budget));
        return now_;
      }
      budget -= available;
      now_ = seg.end;
      ++segment_;
    }
    return exhausted();
  }

  [[nodiscard]] const RateBound& bound() const noexcept { return bound_; }
  [[nodiscard]] double now() const noexcept { return now_; }

 private:
  // Smallest s > 0 with r0*s + b*s^2/2 = budget, in the cancellation-free form.
  static double solve(double r0, double b, double budget) {
    if (b == 0.0) {
      return budget / r0;
    }
    const double disc = std::max(0.0, r0 * r0 + 2.0 * b * budget);
    return 2.0 * budget / (r0 + std::sqrt(disc));
  }

  std::optional<double> exhausted() {
    segment_ = bound_.segments().size();
    now_ = bound_.horizon();
    return std::nullopt;
  }

  RateBound bound_;
  std::size_t segment_ = 0;
  double now_ = 0.0;
};

/// Outcome of a thinning run: the first accepted time, if any, and how many proposals it took.
struct ThinningResult {
  std::optional<double> time;
  std::size_t proposals = 0;
};

/// First event of a Poisson process with rate `true_rate`, simulated by thinning `bound`.
/**
 * Proposals are accepted with probability `true_rate(u) / bound(u)`. Proposals beyond
 * `horizon` (or the envelope's own horizon) end the search without an event. A proposal
 * where the rate exceeds the envelope raises `InvalidBoundError`.
 */
template <class RateFn>
ThinningResult first_event_thinning(const RateBound& bound, RateFn&& true_rate, RngStream& rng,
                                    double horizon = kInfinity) {
  ThinningResult result;
  PoissonProposals proposals{bound};
  while (true) {
    const auto u = proposals.next(rng);
    if (!u || *u >= horizon) {
      return result;
    }
    ++result.proposals;
    const double envelope = bound(*u);
    const double rate = true_rate(*u);
    if (exceeds_bound(rate, envelope)) {
      throw InvalidBoundError{*u, rate, envelope, "first_event_thinning"};
    }
    if (rng.uniform() * envelope < rate) {
      result.time = *u;
      return result;
    }
  }
}

/// Integrated rate `Lambda(s)` with an optional closed-form inverse.
struct CumulativeRate {
  std::function<double(double)> cumulative;
  std::function<double(double)> inverse;
};

/// First event time by inversion: the smallest s with `Lambda(s) = budget`.
/**
 * Returns nothing if `Lambda(horizon) < budget`. Without a closed-form inverse the horizon
 * must be finite and the root is found by bisection. Non-monotone cumulative rates are
 * detected on a probe grid and rejected.
 */
inline std::optional<double> first_event_inversion(const CumulativeRate& rate, double budget,
                                                   double horizon = kInfinity) {
  if (!rate.cumulative) {
    throw ContractViolation{"first_event_inversion: missing cumulative rate"};
  }
  if (std::abs(rate.cumulative(0.0)) > 1e-12) {
    throw ContractViolation{"first_event_inversion: cumulative rate must vanish at 0"};
  }
  const double probe_end = std::isfinite(horizon) ? horizon : 1.0;
  constexpr int kProbes = 64;
  double previous = 0.0;
  for (int k = 1; k <= kProbes; ++k) {
    const double value = rate.cumulative(probe_end * k / kProbes);
    if (value < previous) {
      throw ContractViolation{"first_event_inversion: cumulative rate is not monotone"};
    }
    previous = value;
  }

  if (std::isfinite(horizon) && rate.cumulative(horizon) < budget) {
    return std::nullopt;
  }
  if (rate.inverse) {
    const double s = rate.inverse(budget);
    if (!std::isfinite(s)) {
      return std::nullopt;
    }
    return s;
  }
  if (!std::isfinite(horizon)) {
    throw ContractViolation{"first_event_inversion: numeric inversion needs a finite horizon"};
  }
  double lo = 0.0;
  double hi = horizon;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double value = rate.cumulative(mid);
    if (value < budget) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

}  // namespace ctmc::pdp

#endif  // CTMC_PDP_EVENT_TIME_HPP

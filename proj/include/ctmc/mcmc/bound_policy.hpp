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

#ifndef CTMC_MCMC_BOUND_POLICY_HPP
#define CTMC_MCMC_BOUND_POLICY_HPP

#include <ctmc/errors.hpp>
#include <ctmc/linalg.hpp>
#include <ctmc/pdp/flow.hpp>
#include <ctmc/pdp/rate_bound.hpp>
#include <ctmc/targets/bounds.hpp>
#include <ctmc/targets/control_variate.hpp>
#include <ctmc/targets/gaussian.hpp>
#include <ctmc/targets/posterior.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ctmc::mcmc {

/// Box [lo, hi]^d outside which a bound is not guaranteed.
struct ValidityDomain {
  double lo = -pdp::kInfinity;
  double hi = pdp::kInfinity;

  [[nodiscard]] bool contains(const Vector& x) const { return x.minCoeff() >= lo && x.maxCoeff() <= hi; }
};

/// Thinning envelopes for the switching rates of a sampler.
/**
 * `envelope(anchor, coordinate, remaining)` bounds the rate of the whole-velocity event when
 * `coordinate` is empty, or of the Zig-Zag flip of that coordinate, along the flow from `anchor`.
 */
struct BoundPolicy {
  std::string name;
  std::function<pdp::RateBound(const pdp::PdpState& anchor, std::optional<std::size_t> coordinate, double remaining)>
      envelope;
  std::optional<ValidityDomain> domain;
  bool exact_only = false;
};

/// Constant envelope, e.g. a global bound.
inline BoundPolicy constant_bound(std::string name, double rate, std::optional<ValidityDomain> domain = std::nullopt,
                                  bool exact_only = false) {
  if (!(rate >= 0.0) || !std::isfinite(rate)) {
    throw ConfigError{"constant_bound: rate must be finite and non-negative"};
  }
  return {std::move(name),
          [rate](const pdp::PdpState&, std::optional<std::size_t>, double remaining) {
            return pdp::RateBound::constant(rate, remaining);
          },
          domain, exact_only};
}

/// n max_i b_i, valid for every estimator on the table's interval.
inline BoundPolicy simple_global_bound(const targets::FactorBoundTable& table) {
  return constant_bound("simple", targets::global_rate_bound_simple(table), ValidityDomain{table.lo, table.hi});
}

/// sum_i b_i, valid for the exact and non-uniform estimators on the table's interval.
inline BoundPolicy sum_global_bound(const targets::FactorBoundTable& table) {
  return constant_bound("sum", targets::global_rate_bound_sum(table), ValidityDomain{table.lo, table.hi});
}

/// Largest |grad log pi| over the region where the log posterior is within `depth` of its maximum.
template <class LogDensity, class Gradient>
BoundPolicy max_gradient_bound(LogDensity&& log_density, Gradient&& gradient, double lo, double hi,
                               double depth = 50.0) {
  const auto region = targets::high_density_hull(log_density, lo, hi, depth);
  const double rate = targets::max_abs_gradient(gradient, region.lo, region.hi);
  return constant_bound("max", rate, ValidityDomain{region.lo, region.hi}, true);
}

/// |grad log pi(x_hat)| + n C |x_t + v s - x_hat|, one-dimensional.
inline BoundPolicy cv_bound(std::shared_ptr<const targets::ControlVariateCache> cache,
                            const targets::FactorBoundTable& table) {
  return {"cv",
          [cache, table](const pdp::PdpState& a, std::optional<std::size_t>, double remaining) {
            return targets::cv_rate_envelope(*cache, table, a.x[0], a.v[0], remaining);
          },
          ValidityDomain{table.lo, table.hi}};
}

/// Envelope for the hybrid estimator: the control-variate envelope inside radius k / sqrt(n)
/// of x_hat and the simple global bound outside, one-dimensional.
inline BoundPolicy hybrid_bound(std::shared_ptr<const targets::ControlVariateCache> cache,
                                const targets::FactorBoundTable& table, double k = 5.0) {
  const double outer = targets::global_rate_bound_simple(table);
  const double base = std::abs(cache->grad_at_hat[0]);
  const double slope = static_cast<double>(cache->factor_count()) * table.C;
  const double radius = k / std::sqrt(static_cast<double>(cache->factor_count()));
  const double x_hat = cache->x_hat[0];
  return {"hybrid",
          [=](const pdp::PdpState& a, std::optional<std::size_t>, double remaining) {
            const double x = a.x[0];
            const double v = a.v[0];
            std::vector<double> cuts{0.0, remaining};
            if (v != 0.0) {
              for (double target : {x_hat - radius, x_hat, x_hat + radius}) {
                const double s = (target - x) / v;
                if (s > 0.0 && s < remaining) cuts.push_back(s);
              }
            }
            std::sort(cuts.begin(), cuts.end());
            cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
            std::vector<pdp::BoundSegment> segments;
            for (std::size_t m = 0; m + 1 < cuts.size(); ++m) {
              const double s0 = cuts[m];
              const double s1 = cuts[m + 1];
              const double mid = std::isinf(s1) ? s0 + 1.0 : 0.5 * (s0 + s1);
              const double offset_mid = x + v * mid - x_hat;
              if (std::abs(offset_mid) <= radius) {
                const double direction = (offset_mid > 0.0) == (v > 0.0) ? 1.0 : -1.0;
                segments.push_back({s0, s1, base + slope * std::abs(x + v * s0 - x_hat),
                                    v == 0.0 ? 0.0 : direction * slope * std::abs(v)});
              } else {
                segments.push_back({s0, s1, outer, 0.0});
              }
            }
            return pdp::RateBound{std::move(segments)};
          },
          ValidityDomain{table.lo, table.hi}};
}

/// Exact envelope for Gaussian targets, whose canonical rates are positive parts of affine functions of s.
inline BoundPolicy gaussian_exact_bound(const targets::GaussianTarget& target) {
  return {"gaussian",
          [target](const pdp::PdpState& a, std::optional<std::size_t> coordinate, double remaining) {
            const Vector drift = target.precision() * (a.x - target.mean());
            const Vector speed = target.precision() * a.v;
            if (coordinate) {
              const auto i = static_cast<Eigen::Index>(*coordinate);
              return pdp::RateBound::positive_part_of_affine(a.v[i] * drift[i], a.v[i] * speed[i], remaining);
            }
            return pdp::RateBound::positive_part_of_affine(a.v.dot(drift), a.v.dot(speed), remaining);
          },
          std::nullopt, true};
}

}  // namespace ctmc::mcmc

#endif  // CTMC_MCMC_BOUND_POLICY_HPP

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

#ifndef CTMC_TARGETS_BOUNDS_HPP
#define CTMC_TARGETS_BOUNDS_HPP

#include <ctmc/errors.hpp>
#include <ctmc/linalg.hpp>
#include <ctmc/pdp/rate_bound.hpp>
#include <ctmc/targets/control_variate.hpp>
#include <ctmc/targets/factorized.hpp>
#include <ctmc/targets/search.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

namespace ctmc::targets {

/// Per-factor gradient bounds and a common second-derivative bound, valid on [lo, hi].
struct FactorBoundTable {
  std::vector<double> per_factor_max_abs_grad;
  double C = 0.0;
  double lo = 0.0;
  double hi = 0.0;

  [[nodiscard]] std::size_t factor_count() const { return per_factor_max_abs_grad.size(); }
  [[nodiscard]] bool contains(double x) const { return x >= lo && x <= hi; }
  bool operator==(const FactorBoundTable&) const = default;
};

struct SearchInterval {
  double lo = 0.0;
  double hi = 0.0;
};

inline constexpr double kBoundInflation = 1.01;
inline constexpr double kBoundGridStep = 0.05;

/// Hull of [min(y) - 100, max(y) + 100] and [-20, 20].
inline SearchInterval search_interval(const std::vector<double>& data) {
  if (data.empty()) {
    throw ContractViolation{"search_interval: empty data"};
  }
  const auto [lo, hi] = std::minmax_element(data.begin(), data.end());
  return {std::min(*lo - 100.0, -20.0), std::max(*hi + 100.0, 20.0)};
}

/// Bounds max_x |d/dx log pi_i| for every factor and max_{i,x} |d^2/dx^2 log pi_i| on an interval.
template <ScalarFactorizedTarget T>
FactorBoundTable factor_bound_table(const T& target, SearchInterval interval, double step = kBoundGridStep) {
  FactorBoundTable table;
  table.lo = interval.lo;
  table.hi = interval.hi;
  const std::size_t n = target.factor_count();
  table.per_factor_max_abs_grad.resize(n);
  double c = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto grad = grid_golden_maximum([&](double x) { return std::abs(target.factor_grad(i, x)); },
                                          interval.lo, interval.hi, step);
    const auto second = grid_golden_maximum([&](double x) { return std::abs(target.factor_second(i, x)); },
                                            interval.lo, interval.hi, step);
    table.per_factor_max_abs_grad[i] = kBoundInflation * grad.value;
    c = std::max(c, second.value);
  }
  table.C = kBoundInflation * c;
  return table;
}

/// n times the largest factor bound.
inline double global_rate_bound_simple(const FactorBoundTable& table) {
  if (table.per_factor_max_abs_grad.empty()) {
    return 0.0;
  }
  return static_cast<double>(table.factor_count()) *
         *std::max_element(table.per_factor_max_abs_grad.begin(), table.per_factor_max_abs_grad.end());
}

/// Sum of the factor bounds.
inline double global_rate_bound_sum(const FactorBoundTable& table) {
  double total = 0.0;
  for (double b : table.per_factor_max_abs_grad) total += b;
  return total;
}

/// |grad log pi(x_hat)| + n C |x - x_hat| for one-dimensional targets.
inline double cv_rate_bound(const ControlVariateCache& cache, const FactorBoundTable& table, double x) {
  return std::abs(cache.grad_at_hat[0]) +
         static_cast<double>(cache.factor_count()) * table.C * std::abs(x - cache.x_hat[0]);
}

/// cv_rate_bound along the flow x + v s, as a V-shaped two-segment envelope in s.
inline pdp::RateBound cv_rate_envelope(const ControlVariateCache& cache, const FactorBoundTable& table, double x,
                                       double v, double horizon = pdp::kInfinity) {
  const double base = std::abs(cache.grad_at_hat[0]);
  const double slope = static_cast<double>(cache.factor_count()) * table.C;
  const double offset = x - cache.x_hat[0];
  if (v == 0.0 || slope == 0.0) {
    return pdp::RateBound::constant(base + slope * std::abs(offset), horizon);
  }
  const double crossing = -offset / v;
  const double speed = std::abs(v);
  if (!(crossing > 0.0) || crossing >= horizon) {
    const double sign = crossing > 0.0 ? -1.0 : 1.0;
    return pdp::RateBound({{0.0, horizon, base + slope * std::abs(offset), sign * slope * speed}});
  }
  return pdp::RateBound({{0.0, crossing, base + slope * std::abs(offset), -slope * speed},
                         {crossing, horizon, base, slope * speed}});
}

/// Largest |grad log pi| over [lo, hi], inflated by 1%.
template <class GradFn>
double max_abs_gradient(GradFn&& grad, double lo, double hi, double step = kBoundGridStep) {
  return kBoundInflation * grid_golden_maximum([&](double x) { return std::abs(grad(x)); }, lo, hi, step).value;
}

}  // namespace ctmc::targets

#endif  // CTMC_TARGETS_BOUNDS_HPP

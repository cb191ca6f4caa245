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

#ifndef CTMC_TARGETS_POSTERIOR_HPP
#define CTMC_TARGETS_POSTERIOR_HPP

#include <ctmc/errors.hpp>
#include <ctmc/rng.hpp>
#include <ctmc/targets/factorized.hpp>
#include <ctmc/targets/search.hpp>

#include <ctmc/linalg.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <vector>

namespace ctmc::targets {

/// Posterior mode of a one-dimensional target: grid scan over [lo, hi], then golden section.
template <class LogDensity>
double find_mode(LogDensity&& log_density, double lo, double hi, double step = 0.05, double tolerance = 1e-8) {
  return grid_golden_maximum(log_density, lo, hi, step, tolerance).argmax;
}

struct DensityHull {
  double lo = 0.0;
  double hi = 0.0;
  double mode = 0.0;
  double log_max = 0.0;
};

/// Smallest grid interval holding every point whose log density is within `depth` of the maximum.
/**
 * The maximum is located by grid scan plus golden section; the hull is widened by one grid cell
 * on each side and clipped to [lo, hi].
 */
template <class LogDensity>
DensityHull high_density_hull(LogDensity&& log_density, double lo, double hi, double depth, double step = 0.05) {
  const auto best = grid_golden_maximum(log_density, lo, hi, step);
  const auto cells = static_cast<std::size_t>(std::ceil((hi - lo) / step));
  const double h = (hi - lo) / static_cast<double>(cells);
  double first = best.argmax;
  double last = best.argmax;
  for (std::size_t k = 0; k <= cells; ++k) {
    const double x = lo + static_cast<double>(k) * h;
    if (log_density(x) >= best.value - depth) {
      first = std::min(first, x);
      last = std::max(last, x);
    }
  }
  return {std::max(lo, first - h), std::min(hi, last + h), best.argmax, best.value};
}

/// Normalized one-dimensional density tabulated by trapezoidal quadrature.
/**
 * The support is the set where the log density is within 60 nats of its maximum, located by a
 * coarse scan of [lo, hi]. The trapezoid grid is doubled until the normalizer, mean and second
 * moment all change by less than the relative tolerance.
 */
class PosteriorQuadrature {
 public:
  template <class LogDensity>
  PosteriorQuadrature(LogDensity&& log_density, double lo, double hi, double scan_step = 0.05,
                      double tolerance = 1e-6, int max_doublings = 18)
      : log_density_{log_density} {
    if (!(hi > lo)) {
      throw ContractViolation{"PosteriorQuadrature: need lo < hi"};
    }
    const auto hull = high_density_hull(log_density_, lo, hi, kSupportDepth, scan_step);
    mode_ = hull.mode;
    log_max_ = hull.log_max;
    a_ = hull.lo;
    b_ = hull.hi;
    integrate(tolerance, max_doublings);
  }

  [[nodiscard]] double lower() const noexcept { return a_; }
  [[nodiscard]] double upper() const noexcept { return b_; }
  [[nodiscard]] double mode() const noexcept { return mode_; }
  [[nodiscard]] double mean() const noexcept { return mean_; }
  [[nodiscard]] double variance() const noexcept { return variance_; }
  [[nodiscard]] double sd() const noexcept { return std::sqrt(variance_); }
  [[nodiscard]] double log_normalizer() const noexcept { return log_max_ + std::log(scaled_mass_); }
  [[nodiscard]] const std::vector<double>& nodes() const noexcept { return nodes_; }

  [[nodiscard]] double density(double x) const {
    if (x < a_ || x > b_) {
      return 0.0;
    }
    return std::exp(log_density_(x) - log_normalizer());
  }

  [[nodiscard]] double cdf(double x) const {
    if (x <= a_) return 0.0;
    if (x >= b_) return 1.0;
    const double pos = (x - a_) / spacing_;
    const auto k = std::min(static_cast<std::size_t>(pos), nodes_.size() - 2);
    const double frac = pos - static_cast<double>(k);
    return cumulative_[k] + frac * (cumulative_[k + 1] - cumulative_[k]);
  }

  /// Trapezoidal expectation of f on the final grid.
  template <class F>
  [[nodiscard]] double expectation(F&& f) const {
    double total = 0.0;
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
      const double w = (k == 0 || k + 1 == nodes_.size()) ? 0.5 : 1.0;
      total += w * weights_[k] * f(nodes_[k]);
    }
    return total * spacing_ / scaled_mass_;
  }

  /// Draw by inversion of the tabulated cdf.
  double sample(RngStream& rng) const {
    const double u = rng.uniform();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    const auto k = std::min<std::size_t>(static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - cumulative_.begin(), 1)) - 1,
                                         nodes_.size() - 2);
    const double width = cumulative_[k + 1] - cumulative_[k];
    const double frac = width > 0.0 ? (u - cumulative_[k]) / width : 0.5;
    return nodes_[k] + std::clamp(frac, 0.0, 1.0) * spacing_;
  }

 private:
  static constexpr double kSupportDepth = 60.0;

  void integrate(double tolerance, int max_doublings) {
    std::size_t intervals = 64;
    tabulate(intervals);
    auto moments = current_moments();
    for (int level = 0; level < max_doublings; ++level) {
      refine();
      const auto next = current_moments();
      const bool converged = relative_difference(next[0], moments[0]) < tolerance &&
                             relative_difference(next[1], moments[1], 1.0) < tolerance &&
                             relative_difference(next[2], moments[2], 1.0) < tolerance;
      moments = next;
      if (converged) break;
    }
    scaled_mass_ = moments[0];
    mean_ = moments[1];
    variance_ = std::max(0.0, moments[2] - mean_ * mean_);
    cumulative_.assign(nodes_.size(), 0.0);
    for (std::size_t k = 1; k < nodes_.size(); ++k) {
      cumulative_[k] = cumulative_[k - 1] + 0.5 * spacing_ * (weights_[k - 1] + weights_[k]) / scaled_mass_;
    }
    cumulative_.back() = 1.0;
  }

  void tabulate(std::size_t intervals) {
    spacing_ = (b_ - a_) / static_cast<double>(intervals);
    nodes_.resize(intervals + 1);
    weights_.resize(intervals + 1);
    for (std::size_t k = 0; k <= intervals; ++k) {
      nodes_[k] = a_ + static_cast<double>(k) * spacing_;
      weights_[k] = std::exp(log_density_(nodes_[k]) - log_max_);
    }
  }

  // Halves the spacing, evaluating only the new midpoints.
  void refine() {
    const std::size_t intervals = nodes_.size() - 1;
    std::vector<double> nodes(2 * intervals + 1);
    std::vector<double> weights(2 * intervals + 1);
    spacing_ *= 0.5;
    for (std::size_t k = 0; k <= intervals; ++k) {
      nodes[2 * k] = nodes_[k];
      weights[2 * k] = weights_[k];
      if (k < intervals) {
        nodes[2 * k + 1] = a_ + static_cast<double>(2 * k + 1) * spacing_;
        weights[2 * k + 1] = std::exp(log_density_(nodes[2 * k + 1]) - log_max_);
      }
    }
    nodes_ = std::move(nodes);
    weights_ = std::move(weights);
  }

  [[nodiscard]] std::array<double, 3> current_moments() const {
    double m0 = 0.0, m1 = 0.0, m2 = 0.0;
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
      const double w = ((k == 0 || k + 1 == nodes_.size()) ? 0.5 : 1.0) * weights_[k];
      m0 += w;
      m1 += w * nodes_[k];
      m2 += w * nodes_[k] * nodes_[k];
    }
    return {m0 * spacing_, m1 / m0, m2 / m0};
  }

  std::function<double(double)> log_density_;
  double mode_ = 0.0;
  double log_max_ = 0.0;
  double a_ = 0.0;
  double b_ = 0.0;
  double spacing_ = 0.0;
  double scaled_mass_ = 1.0;
  double mean_ = 0.0;
  double variance_ = 0.0;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::vector<double> cumulative_;
};

/// Quadrature of a one-dimensional factorized target; the target must outlive the result.
template <ScalarFactorizedTarget T>
PosteriorQuadrature posterior_quadrature(const T& target, double lo, double hi) {
  return PosteriorQuadrature{[&target](double x) { return scalar_log_pi(target, x); }, lo, hi};
}

}  // namespace ctmc::targets

#endif  // CTMC_TARGETS_POSTERIOR_HPP

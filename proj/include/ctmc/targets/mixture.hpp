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

#ifndef CTMC_TARGETS_MIXTURE_HPP
#define CTMC_TARGETS_MIXTURE_HPP

#include <ctmc/errors.hpp>
#include <ctmc/linalg.hpp>
#include <ctmc/rng.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace ctmc::targets {

/// Parameters of the two-component location model y ~ p N(0, broad^2) + (1 - p) N(x, narrow^2).
struct MixtureParams {
  double p = 0.95;
  double broad_sd = 10.0;
  double narrow_sd = 1.0;
  double prior_variance = 4.0;
};

/// Posterior for the location x of the narrow mixture component, with a N(0, 4) prior.
/**
 * Factor i is the likelihood of observation i times the 1/n-th power of the prior:
 *
 *   log pi_i(x) = log( p/broad * exp(-y_i^2 / (2 broad^2)) + (1-p)/narrow * exp(-(x - y_i)^2 / (2 narrow^2)) )
 *                 - x^2 / (2 prior_variance n)
 *
 * (the common 1/sqrt(2 pi) is dropped). Derivatives use the responsibility r_i(x) of the
 * narrow component, computed as a logistic function of the log-odds for stability.
 */
class MixtureTarget {
 public:
  explicit MixtureTarget(std::vector<double> data, MixtureParams params = {})
      : data_{std::move(data)}, params_{params} {
    if (data_.empty()) {
      throw ContractViolation{"MixtureTarget: empty data set"};
    }
    if (!(params_.p >= 0.0 && params_.p <= 1.0) || !(params_.broad_sd > 0.0) || !(params_.narrow_sd > 0.0) ||
        !(params_.prior_variance > 0.0)) {
      throw ContractViolation{"MixtureTarget: invalid parameters"};
    }
    const double n = static_cast<double>(data_.size());
    prior_scale_ = 1.0 / (params_.prior_variance * n);
    log_narrow_weight_ = std::log1p(-params_.p) - std::log(params_.narrow_sd);
    narrow_precision_ = 1.0 / (params_.narrow_sd * params_.narrow_sd);
    const double log_broad_weight = std::log(params_.p) - std::log(params_.broad_sd);
    log_broad_.reserve(data_.size());
    for (double y : data_) {
      log_broad_.push_back(log_broad_weight - 0.5 * y * y / (params_.broad_sd * params_.broad_sd));
    }
  }

  [[nodiscard]] std::size_t dimension() const { return 1; }
  [[nodiscard]] std::size_t factor_count() const { return data_.size(); }
  [[nodiscard]] const std::vector<double>& data() const noexcept { return data_; }
  [[nodiscard]] const MixtureParams& params() const noexcept { return params_; }

  [[nodiscard]] double factor_log(std::size_t i, double x) const {
    const double a = log_broad_[i];
    const double b = log_narrow(i, x);
    const double hi = std::max(a, b);
    const double lse = std::isinf(hi) ? hi : hi + std::log(std::exp(a - hi) + std::exp(b - hi));
    return lse - 0.5 * prior_scale_ * x * x;
  }

  [[nodiscard]] double factor_grad(std::size_t i, double x) const {
    const double r = responsibility(i, x);
    return r * (data_[i] - x) * narrow_precision_ - prior_scale_ * x;
  }

  [[nodiscard]] double factor_second(std::size_t i, double x) const {
    const double r = responsibility(i, x);
    const double z = (data_[i] - x) * narrow_precision_;
    return r * (1.0 - r) * z * z - r * narrow_precision_ - prior_scale_;
  }

  [[nodiscard]] double log_factor(std::size_t i, const Vector& x) const { return factor_log(i, x[0]); }
  [[nodiscard]] Vector grad_log_factor(std::size_t i, const Vector& x) const {
    return Vector::Constant(1, factor_grad(i, x[0]));
  }
  [[nodiscard]] Vector second_deriv_diag_factor(std::size_t i, const Vector& x) const {
    return Vector::Constant(1, factor_second(i, x[0]));
  }

  [[nodiscard]] double log_pi(const Vector& x) const {
    double total = 0.0;
    for (std::size_t i = 0; i < data_.size(); ++i) total += factor_log(i, x[0]);
    return total;
  }
  [[nodiscard]] Vector grad_log_pi(const Vector& x) const {
    double total = 0.0;
    for (std::size_t i = 0; i < data_.size(); ++i) total += factor_grad(i, x[0]);
    return Vector::Constant(1, total);
  }
  [[nodiscard]] Vector second_deriv_diag(const Vector& x) const {
    double total = 0.0;
    for (std::size_t i = 0; i < data_.size(); ++i) total += factor_second(i, x[0]);
    return Vector::Constant(1, total);
  }

  /// Posterior probability that observation i came from the narrow component, at location x.
  [[nodiscard]] double responsibility(std::size_t i, double x) const {
    const double log_odds = log_broad_[i] - log_narrow(i, x);
    if (std::isnan(log_odds)) {
      return 0.0;
    }
    return 1.0 / (1.0 + std::exp(log_odds));
  }

 private:
  [[nodiscard]] double log_narrow(std::size_t i, double x) const {
    const double r = x - data_[i];
    return log_narrow_weight_ - 0.5 * r * r * narrow_precision_;
  }

  std::vector<double> data_;
  MixtureParams params_;
  std::vector<double> log_broad_;
  double prior_scale_ = 0.0;
  double log_narrow_weight_ = 0.0;
  double narrow_precision_ = 1.0;
};

/// Draws n observations: N(0, broad^2) with probability p, else N(x_true, narrow^2).
inline std::vector<double> simulate_mixture_data(std::size_t n, RngStream& rng, double x_true = 4.0, double p = 0.95,
                                                 double broad_sd = 10.0, double narrow_sd = 1.0) {
  if (n == 0) {
    throw ContractViolation{"simulate_mixture_data: n must be positive"};
  }
  std::vector<double> y;
  y.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    const bool broad = rng.uniform() < p;
    y.push_back(broad ? broad_sd * rng.normal() : x_true + narrow_sd * rng.normal());
  }
  return y;
}

}  // namespace ctmc::targets

#endif  // CTMC_TARGETS_MIXTURE_HPP

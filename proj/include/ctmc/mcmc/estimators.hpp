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

#ifndef CTMC_MCMC_ESTIMATORS_HPP
#define CTMC_MCMC_ESTIMATORS_HPP

#include <ctmc/errors.hpp>
#include <ctmc/linalg.hpp>
#include <ctmc/rng.hpp>
#include <ctmc/targets/control_variate.hpp>
#include <ctmc/targets/factorized.hpp>

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

namespace ctmc::mcmc {

/// Full gradient, no sub-sampling.
struct ExactEstimator {};

/// -n grad log pi_I(x) with I uniform.
struct SimpleEstimator {};

/// -grad log pi_I(x) / p_I with p_i proportional to a per-factor weight.
class NonUniformEstimator {
 public:
  explicit NonUniformEstimator(std::vector<double> weights) : weights_{std::move(weights)} {
    if (weights_.empty()) {
      throw ContractViolation{"NonUniformEstimator: no weights"};
    }
    cumulative_.reserve(weights_.size());
    double total = 0.0;
    for (double w : weights_) {
      if (!(w > 0.0) || !std::isfinite(w)) {
        throw ContractViolation{"NonUniformEstimator: weights must be positive and finite"};
      }
      total += w;
      cumulative_.push_back(total);
    }
    total_ = total;
  }

  [[nodiscard]] double probability(std::size_t i) const { return weights_[i] / total_; }
  [[nodiscard]] std::size_t draw(RngStream& rng) const { return rng.index_from_cumulative(cumulative_); }
  [[nodiscard]] std::size_t size() const { return weights_.size(); }
  [[nodiscard]] double total() const { return total_; }

 private:
  std::vector<double> weights_;
  std::vector<double> cumulative_;
  double total_ = 0.0;
};

/// -grad log pi(x_hat) + n (grad log pi_I(x_hat) - grad log pi_I(x)) with I uniform.
struct CvEstimator {
  std::shared_ptr<const targets::ControlVariateCache> cache;
};

/// Control variates within radius k / sqrt(n) of x_hat, simple sub-sampling elsewhere.
struct HybridEstimator {
  std::shared_ptr<const targets::ControlVariateCache> cache;
  double k = 5.0;

  [[nodiscard]] bool uses_cv(const Vector& x) const {
    const double n = static_cast<double>(cache->factor_count());
    return (x - cache->x_hat).norm() <= k / std::sqrt(n);
  }
};

using RateEstimator = std::variant<ExactEstimator, SimpleEstimator, NonUniformEstimator, CvEstimator, HybridEstimator>;

inline std::string estimator_name(const RateEstimator& est) {
  constexpr const char* names[] = {"exact", "simple", "nonuniform", "cv", "hybrid"};
  return names[est.index()];
}

/// A realization of an unbiased estimator U(x) of -grad log pi(x).
struct GradientEstimate {
  Vector u;
  std::optional<std::size_t> factor_index;
};

namespace detail {

template <class T>
void check_cache(const std::shared_ptr<const targets::ControlVariateCache>& cache, const T& target) {
  if (!cache) {
    throw ConfigError{"control-variate estimator requires a cache"};
  }
  if (cache->factor_count() != target.factor_count()) {
    throw ConfigError{"control-variate cache was built for a different target"};
  }
}

template <class T>
Vector cv_value(const targets::ControlVariateCache& cache, const T& target, const Vector& x, std::size_t i) {
  const double n = static_cast<double>(target.factor_count());
  return -cache.grad_at_hat + n * (cache.per_factor_grad_at_hat[i] - target.grad_log_factor(i, x));
}

}  // namespace detail

/// Value of the estimator when factor `i` is drawn (ignored by the exact estimator).
template <targets::FactorizedTarget T>
GradientEstimate estimate_gradient_for_index(const RateEstimator& est, const T& target, const Vector& x,
                                             std::size_t i) {
  const double n = static_cast<double>(target.factor_count());
  return std::visit(
      [&](const auto& e) -> GradientEstimate {
        using E = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<E, ExactEstimator>) {
          return {-targets::grad_log_pi(target, x), std::nullopt};
        } else if constexpr (std::is_same_v<E, SimpleEstimator>) {
          return {-n * target.grad_log_factor(i, x), i};
        } else if constexpr (std::is_same_v<E, NonUniformEstimator>) {
          return {-target.grad_log_factor(i, x) / e.probability(i), i};
        } else if constexpr (std::is_same_v<E, CvEstimator>) {
          detail::check_cache(e.cache, target);
          return {detail::cv_value(*e.cache, target, x, i), i};
        } else {
          detail::check_cache(e.cache, target);
          if (e.uses_cv(x)) {
            return {detail::cv_value(*e.cache, target, x, i), i};
          }
          return {-n * target.grad_log_factor(i, x), i};
        }
      },
      est);
}

/// Probability that factor i is drawn.
inline double index_probability(const RateEstimator& est, std::size_t n, std::size_t i) {
  if (const auto* e = std::get_if<NonUniformEstimator>(&est)) {
    return e->probability(i);
  }
  if (std::holds_alternative<ExactEstimator>(est)) {
    return i == 0 ? 1.0 : 0.0;
  }
  return 1.0 / static_cast<double>(n);
}

/// Draws I and returns U(x).
template <targets::FactorizedTarget T>
GradientEstimate estimate_gradient(const RateEstimator& est, const T& target, const Vector& x, RngStream& rng) {
  const std::size_t n = target.factor_count();
  std::size_t i = 0;
  if (const auto* e = std::get_if<NonUniformEstimator>(&est)) {
    if (e->size() != n) {
      throw ConfigError{"non-uniform estimator weights do not match the factor count"};
    }
    i = e->draw(rng);
  } else if (!std::holds_alternative<ExactEstimator>(est)) {
    i = rng.index(n);
  }
  return estimate_gradient_for_index(est, target, x, i);
}

/// Number of factor gradient evaluations one estimate costs.
inline std::size_t factor_evaluations(const RateEstimator& est, std::size_t n) {
  return std::holds_alternative<ExactEstimator>(est) ? n : 1;
}

/// max{0, v . u}.
inline double random_rate(const GradientEstimate& estimate, const Vector& v) {
  return std::max(0.0, v.dot(estimate.u));
}

/// E_I[max{0, v . U(x)}] by enumeration over the factor index.
template <targets::FactorizedTarget T>
double expected_random_rate(const RateEstimator& est, const T& target, const Vector& x, const Vector& v) {
  if (std::holds_alternative<ExactEstimator>(est)) {
    return random_rate(estimate_gradient_for_index(est, target, x, 0), v);
  }
  double total = 0.0;
  for (std::size_t i = 0; i < target.factor_count(); ++i) {
    total += index_probability(est, target.factor_count(), i) *
             random_rate(estimate_gradient_for_index(est, target, x, i), v);
  }
  return total;
}

}  // namespace ctmc::mcmc

#endif  // CTMC_MCMC_ESTIMATORS_HPP

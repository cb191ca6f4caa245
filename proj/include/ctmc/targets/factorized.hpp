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

#ifndef CTMC_TARGETS_FACTORIZED_HPP
#define CTMC_TARGETS_FACTORIZED_HPP

#include <ctmc/errors.hpp>
#include <ctmc/linalg.hpp>

#include <concepts>
#include <cstddef>
#include <string>

namespace ctmc::targets {

/// A density known up to a constant as a product of n factors, pi(x) ∝ prod_i pi_i(x).
template <class T>
concept FactorizedTarget = requires(const T& target, std::size_t i, const Vector& x) {
  { target.dimension() } -> std::convertible_to<std::size_t>;
  { target.factor_count() } -> std::convertible_to<std::size_t>;
  { target.log_factor(i, x) } -> std::convertible_to<double>;
  { target.grad_log_factor(i, x) } -> std::convertible_to<Vector>;
};

/// Factorized target that also exposes the diagonal of each factor's Hessian.
template <class T>
concept SecondOrderTarget = FactorizedTarget<T> && requires(const T& target, std::size_t i, const Vector& x) {
  { target.second_deriv_diag_factor(i, x) } -> std::convertible_to<Vector>;
};

/// One-dimensional factorized target with allocation-free scalar accessors.
template <class T>
concept ScalarFactorizedTarget = requires(const T& target, std::size_t i, double x) {
  { target.factor_count() } -> std::convertible_to<std::size_t>;
  { target.factor_log(i, x) } -> std::convertible_to<double>;
  { target.factor_grad(i, x) } -> std::convertible_to<double>;
  { target.factor_second(i, x) } -> std::convertible_to<double>;
};

namespace detail {

template <class T>
concept HasFusedGradient = requires(const T& target, const Vector& x) {
  { target.grad_log_pi(x) } -> std::convertible_to<Vector>;
};

template <class T>
concept HasFusedSecond = requires(const T& target, const Vector& x) {
  { target.second_deriv_diag(x) } -> std::convertible_to<Vector>;
};

template <class T>
concept HasFusedLog = requires(const T& target, const Vector& x) {
  { target.log_pi(x) } -> std::convertible_to<double>;
};

template <FactorizedTarget T>
[[noreturn]] void report_non_finite(const T& target, const Vector& x, const char* what) {
  for (std::size_t i = 0; i < target.factor_count(); ++i) {
    if (!target.grad_log_factor(i, x).allFinite()) {
      throw DomainError{std::string{what} + ": non-finite output from factor " + std::to_string(i)};
    }
  }
  throw DomainError{std::string{what} + ": non-finite output"};
}

}  // namespace detail

/// Exhaustive factor sum of gradients, in index order.
template <FactorizedTarget T>
Vector sum_factor_gradients(const T& target, const Vector& x) {
  Vector total = Vector::Zero(static_cast<Eigen::Index>(target.dimension()));
  for (std::size_t i = 0; i < target.factor_count(); ++i) {
    const Vector g = target.grad_log_factor(i, x);
    if (!g.allFinite()) {
      throw DomainError{"grad_log_pi: non-finite output from factor " + std::to_string(i)};
    }
    total += g;
  }
  return total;
}

/// Gradient of the unnormalized log target.
template <FactorizedTarget T>
Vector grad_log_pi(const T& target, const Vector& x) {
  if (!x.allFinite()) {
    throw DomainError{"grad_log_pi: non-finite position"};
  }
  if constexpr (detail::HasFusedGradient<T>) {
    Vector g = target.grad_log_pi(x);
    if (!g.allFinite()) {
      detail::report_non_finite(target, x, "grad_log_pi");
    }
    return g;
  } else {
    return sum_factor_gradients(target, x);
  }
}

/// Unnormalized log target.
template <FactorizedTarget T>
double log_pi(const T& target, const Vector& x) {
  if constexpr (detail::HasFusedLog<T>) {
    return target.log_pi(x);
  } else {
    double total = 0.0;
    for (std::size_t i = 0; i < target.factor_count(); ++i) {
      total += target.log_factor(i, x);
    }
    return total;
  }
}

/// Diagonal of the Hessian of the log target.
template <SecondOrderTarget T>
Vector second_deriv_diag(const T& target, const Vector& x) {
  if constexpr (detail::HasFusedSecond<T>) {
    return target.second_deriv_diag(x);
  } else {
    Vector total = Vector::Zero(static_cast<Eigen::Index>(target.dimension()));
    for (std::size_t i = 0; i < target.factor_count(); ++i) {
      total += target.second_deriv_diag_factor(i, x);
    }
    return total;
  }
}

/// Scalar log target of a one-dimensional factorized target.
template <ScalarFactorizedTarget T>
double scalar_log_pi(const T& target, double x) {
  double total = 0.0;
  for (std::size_t i = 0; i < target.factor_count(); ++i) total += target.factor_log(i, x);
  return total;
}

template <ScalarFactorizedTarget T>
double scalar_grad_log_pi(const T& target, double x) {
  double total = 0.0;
  for (std::size_t i = 0; i < target.factor_count(); ++i) total += target.factor_grad(i, x);
  return total;
}

template <ScalarFactorizedTarget T>
double scalar_second_log_pi(const T& target, double x) {
  double total = 0.0;
  for (std::size_t i = 0; i < target.factor_count(); ++i) total += target.factor_second(i, x);
  return total;
}

}  // namespace ctmc::targets

#endif  // CTMC_TARGETS_FACTORIZED_HPP

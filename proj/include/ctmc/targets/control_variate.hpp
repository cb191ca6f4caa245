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

#ifndef CTMC_TARGETS_CONTROL_VARIATE_HPP
#define CTMC_TARGETS_CONTROL_VARIATE_HPP

#include <ctmc/linalg.hpp>
#include <ctmc/targets/factorized.hpp>

#include <vector>

namespace ctmc::targets {

/// Derivatives of every factor at a fixed anchor x_hat, reused by control-variate estimators.
struct ControlVariateCache {
  Vector x_hat;
  Vector grad_at_hat;
  Vector second_at_hat;
  std::vector<Vector> per_factor_grad_at_hat;
  std::vector<Vector> per_factor_second_at_hat;
  double rho_hat = 0.0;

  [[nodiscard]] std::size_t factor_count() const { return per_factor_grad_at_hat.size(); }
};

/// Evaluates and stores all factor derivatives at x_hat; the totals are the index-ordered sums.
template <SecondOrderTarget T>
ControlVariateCache make_control_variate_cache(const T& target, const Vector& x_hat) {
  const auto d = static_cast<Eigen::Index>(target.dimension());
  if (x_hat.size() != d) {
    throw ContractViolation{"make_control_variate_cache: anchor has the wrong dimension"};
  }
  ControlVariateCache cache;
  cache.x_hat = x_hat;
  cache.grad_at_hat = Vector::Zero(d);
  cache.second_at_hat = Vector::Zero(d);
  const std::size_t n = target.factor_count();
  cache.per_factor_grad_at_hat.reserve(n);
  cache.per_factor_second_at_hat.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    cache.per_factor_grad_at_hat.push_back(target.grad_log_factor(i, x_hat));
    cache.per_factor_second_at_hat.push_back(target.second_deriv_diag_factor(i, x_hat));
    cache.grad_at_hat += cache.per_factor_grad_at_hat.back();
    cache.second_at_hat += cache.per_factor_second_at_hat.back();
  }
  if (!cache.grad_at_hat.allFinite() || !cache.second_at_hat.allFinite()) {
    throw DomainError{"make_control_variate_cache: non-finite derivatives at the anchor"};
  }
  cache.rho_hat = -0.5 * (cache.second_at_hat.sum() + cache.grad_at_hat.squaredNorm());
  return cache;
}

}  // namespace ctmc::targets

#endif  // CTMC_TARGETS_CONTROL_VARIATE_HPP

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

#ifndef CTMC_CIS_RHO_HPP
#define CTMC_CIS_RHO_HPP

#include <ctmc/errors.hpp>
#include <ctmc/linalg.hpp>
#include <ctmc/rng.hpp>
#include <ctmc/targets/control_variate.hpp>
#include <ctmc/targets/factorized.hpp>

#include <cmath>
#include <functional>
#include <memory>
#include <string>

namespace ctmc::cis {

/// -1/2 sum_i [d^2 log pi / dx_i^2 + (d log pi / dx_i)^2], the SCALE incremental rate.
template <targets::SecondOrderTarget T>
double scale_rho(const T& target, const Vector& x) {
  const Vector g = targets::grad_log_pi(target, x);
  const Vector h = targets::second_deriv_diag(target, x);
  return -0.5 * (h.sum() + g.squaredNorm());
}

/// Sub-sampled SCALE rate with indices j (curvature and first gradient) and k (second gradient).
template <targets::SecondOrderTarget T>
double scale_rho_subsample(const T& target, const Vector& x, std::size_t j, std::size_t k) {
  const double n = static_cast<double>(target.factor_count());
  const Vector gj = target.grad_log_factor(j, x);
  const Vector gk = target.grad_log_factor(k, x);
  const Vector hj = target.second_deriv_diag_factor(j, x);
  return -0.5 * (n * hj.sum() + n * n * gj.dot(gk));
}

template <targets::SecondOrderTarget T>
double scale_rho_subsample(const T& target, const Vector& x, RngStream& rng) {
  const std::size_t j = rng.index(target.factor_count());
  const std::size_t k = rng.index(target.factor_count());
  return scale_rho_subsample(target, x, j, k);
}

/// Control-variate SCALE rate around the cached anchor, indices j and k independent.
/**
 * With d_m = grad log pi_m(x) - grad log pi_m(x_hat):
 *   -n/2 sum_i { [h_j(x) - h_j(x_hat)]_i + n [d_j]_i [d_k + 2 grad log pi(x_hat) / n]_i } + rho_hat.
 */
template <targets::SecondOrderTarget T>
double scale_rho_cv(const T& target, const targets::ControlVariateCache& cache, const Vector& x, std::size_t j,
                    std::size_t k) {
  const double n = static_cast<double>(target.factor_count());
  const Vector dj = target.grad_log_factor(j, x) - cache.per_factor_grad_at_hat[j];
  const Vector dk = k == j ? dj : Vector(target.grad_log_factor(k, x) - cache.per_factor_grad_at_hat[k]);
  const Vector curvature = target.second_deriv_diag_factor(j, x) - cache.per_factor_second_at_hat[j];
  return -0.5 * n * (curvature.sum() + n * dj.dot(dk + (2.0 / n) * cache.grad_at_hat)) + cache.rho_hat;
}

template <targets::SecondOrderTarget T>
double scale_rho_cv(const T& target, const targets::ControlVariateCache& cache, const Vector& x, RngStream& rng) {
  const std::size_t j = rng.index(target.factor_count());
  const std::size_t k = rng.index(target.factor_count());
  return scale_rho_cv(target, cache, x, j, k);
}

/// Incremental rate for a Langevin target under a Brownian proposal.
template <targets::SecondOrderTarget T>
double langevin_rho(const T& target, const Vector& x, const Vector& y, double s) {
  if (!(s > 0.0)) {
    throw DomainError{"langevin_rho: elapsed time must be positive"};
  }
  const Vector g = targets::grad_log_pi(target, x);
  const Vector h = targets::second_deriv_diag(target, x);
  return -0.5 * (((y - x) / s).dot(g) + h.sum());
}

/// Single-factor estimate of langevin_rho.
template <targets::SecondOrderTarget T>
double langevin_rho_subsample(const T& target, const Vector& x, const Vector& y, double s, std::size_t j) {
  if (!(s > 0.0)) {
    throw DomainError{"langevin_rho: elapsed time must be positive"};
  }
  const double n = static_cast<double>(target.factor_count());
  return -0.5 * n *
         (((y - x) / s).dot(target.grad_log_factor(j, x)) + target.second_deriv_diag_factor(j, x).sum());
}

/// (L* q - dq/ds) / q from caller-supplied operator applications.
inline double incremental_rho_generic(const std::function<double(const Vector&, const Vector&, double)>& lstar_q,
                                      const std::function<double(const Vector&, const Vector&, double)>& dq_ds,
                                      const std::function<double(const Vector&, const Vector&, double)>& q,
                                      const Vector& x, const Vector& y, double s) {
  const double density = q(x, y, s);
  if (!(density > 0.0)) {
    throw DomainError{"incremental_rho_generic: transition density must be positive"};
  }
  return (lstar_q(x, y, s) - dq_ds(x, y, s)) / density;
}

/// An incremental-rate evaluator rho(x, y, s) used at CIS events.
struct RhoFn {
  std::function<double(const Vector& x, const Vector& y, double s, RngStream& rng)> evaluate;
  /// Data points touched per evaluation.
  std::size_t accesses = 0;
  std::string name;
};

/// Exact SCALE rate; the target must outlive the result.
template <targets::SecondOrderTarget T>
RhoFn exact_scale_rho(const T& target) {
  return {[&target](const Vector& x, const Vector&, double, RngStream&) { return scale_rho(target, x); },
          target.factor_count(), "exact"};
}

template <targets::SecondOrderTarget T>
RhoFn subsample_scale_rho(const T& target) {
  return {[&target](const Vector& x, const Vector&, double, RngStream& rng) {
            return scale_rho_subsample(target, x, rng);
          },
          2, "subsample"};
}

template <targets::SecondOrderTarget T>
RhoFn cv_scale_rho(const T& target, std::shared_ptr<const targets::ControlVariateCache> cache) {
  if (!cache || cache->factor_count() != target.factor_count()) {
    throw ConfigError{"cv_scale_rho: cache missing or built for another target"};
  }
  return {[&target, cache](const Vector& x, const Vector&, double, RngStream& rng) {
            return scale_rho_cv(target, *cache, x, rng);
          },
          2, "cv"};
}

template <targets::SecondOrderTarget T>
RhoFn exact_langevin_rho(const T& target) {
  return {[&target](const Vector& x, const Vector& y, double s, RngStream&) { return langevin_rho(target, x, y, s); },
          target.factor_count(), "langevin"};
}

template <targets::SecondOrderTarget T>
RhoFn subsample_langevin_rho(const T& target) {
  return {[&target](const Vector& x, const Vector& y, double s, RngStream& rng) {
            return langevin_rho_subsample(target, x, y, s, rng.index(target.factor_count()));
          },
          1, "langevin-subsample"};
}

/// SCALE rate for an arbitrary proposal kernel: -kappa(x) + (laplacian q / 2 - dq/ds) / q, where
/// kappa = -scale_rho is the killing rate. Reduces to scale_rho for the Brownian kernel.
template <targets::SecondOrderTarget T, class Kernel>
RhoFn kernel_scale_rho(const T& target, Kernel kernel) {
  return {[&target, kernel](const Vector& x, const Vector& y, double s, RngStream&) {
            const auto lstar = [&](const Vector& a, const Vector& b, double t) {
              return 0.5 * kernel.laplacian(t, a, b) + scale_rho(target, a) * kernel.density(t, a, b);
            };
            const auto dq = [&](const Vector& a, const Vector& b, double t) { return kernel.time_derivative(t, a, b); };
            const auto q = [&](const Vector& a, const Vector& b, double t) { return kernel.density(t, a, b); };
            return incremental_rho_generic(lstar, dq, q, x, y, s);
          },
          target.factor_count(), "kernel-exact"};
}

/// rho = 0: the proposal process is the target process.
inline RhoFn zero_rho() {
  return {[](const Vector&, const Vector&, double, RngStream&) { return 0.0; }, 0, "zero"};
}

}  // namespace ctmc::cis

#endif  // CTMC_CIS_RHO_HPP

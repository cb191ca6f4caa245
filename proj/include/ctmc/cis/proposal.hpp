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

#ifndef CTMC_CIS_PROPOSAL_HPP
#define CTMC_CIS_PROPOSAL_HPP

#include <ctmc/errors.hpp>
#include <ctmc/linalg.hpp>
#include <ctmc/rng.hpp>

#include <cmath>
#include <numbers>
#include <string>
#include <variant>

namespace ctmc::cis {

namespace detail {

inline void check_time(double s, const char* who) {
  if (!(s > 0.0)) {
    throw DomainError{std::string{who} + ": elapsed time must be positive"};
  }
}

}  // namespace detail

/// Brownian transition density: N(y, s I).
struct BrownianProposal {
  [[nodiscard]] double log_density(double s, const Vector& x, const Vector& y) const {
    detail::check_time(s, "BrownianProposal");
    const double d = static_cast<double>(x.size());
    return -0.5 * d * std::log(2.0 * std::numbers::pi * s) - (x - y).squaredNorm() / (2.0 * s);
  }

  [[nodiscard]] double density(double s, const Vector& x, const Vector& y) const {
    return std::exp(log_density(s, x, y));
  }

  Vector sample(double s, const Vector& y, RngStream& rng) const {
    detail::check_time(s, "BrownianProposal");
    Vector x = y;
    const double scale = std::sqrt(s);
    for (Eigen::Index k = 0; k < x.size(); ++k) x[k] += scale * rng.normal();
    return x;
  }

  /// d q / d s.
  [[nodiscard]] double time_derivative(double s, const Vector& x, const Vector& y) const {
    const double d = static_cast<double>(x.size());
    return density(s, x, y) * ((x - y).squaredNorm() / (2.0 * s * s) - d / (2.0 * s));
  }

  /// Gradient of q with respect to x.
  [[nodiscard]] Vector gradient(double s, const Vector& x, const Vector& y) const {
    return density(s, x, y) * (y - x) / s;
  }

  /// Laplacian of q with respect to x.
  [[nodiscard]] double laplacian(double s, const Vector& x, const Vector& y) const {
    const double d = static_cast<double>(x.size());
    return density(s, x, y) * ((x - y).squaredNorm() / (s * s) - d / s);
  }
};

/// Multivariate t transition density with nu degrees of freedom and scale matrix s I.
struct StudentTProposal {
  double nu = 5.0;

  explicit StudentTProposal(double degrees_of_freedom = 5.0) : nu{degrees_of_freedom} {
    if (!(nu > 0.0)) {
      throw ContractViolation{"StudentTProposal: degrees of freedom must be positive"};
    }
  }

  [[nodiscard]] double log_density(double s, const Vector& x, const Vector& y) const {
    detail::check_time(s, "StudentTProposal");
    const double d = static_cast<double>(x.size());
    const double log_norm = std::lgamma(0.5 * (nu + d)) - std::lgamma(0.5 * nu) -
                            0.5 * d * std::log(nu * std::numbers::pi * s);
    return log_norm - 0.5 * (nu + d) * std::log1p((x - y).squaredNorm() / (nu * s));
  }

  [[nodiscard]] double density(double s, const Vector& x, const Vector& y) const {
    return std::exp(log_density(s, x, y));
  }

  /// d q / d s.
  [[nodiscard]] double time_derivative(double s, const Vector& x, const Vector& y) const {
    const double d = static_cast<double>(x.size());
    const double a = nu * s;
    const double r2 = (x - y).squaredNorm();
    const double u = 1.0 + r2 / a;
    return density(s, x, y) * (-0.5 * d / s + 0.5 * (nu + d) * r2 / (a * s * u));
  }

  /// Gradient of q with respect to x.
  [[nodiscard]] Vector gradient(double s, const Vector& x, const Vector& y) const {
    const double a = nu * s;
    const double u = 1.0 + (x - y).squaredNorm() / a;
    return density(s, x, y) * (-(nu + static_cast<double>(x.size())) / (a * u)) * (x - y);
  }

  /// Laplacian of q with respect to x.
  [[nodiscard]] double laplacian(double s, const Vector& x, const Vector& y) const {
    const double d = static_cast<double>(x.size());
    const double m = 0.5 * (nu + d);
    const double a = nu * s;
    const double r2 = (x - y).squaredNorm();
    const double u = 1.0 + r2 / a;
    const double lap_log = -(2.0 * m / a) * (d / u - 2.0 * r2 / (a * u * u));
    const double grad_log_sq = 4.0 * m * m * r2 / (a * a * u * u);
    return density(s, x, y) * (lap_log + grad_log_sq);
  }

  Vector sample(double s, const Vector& y, RngStream& rng) const {
    detail::check_time(s, "StudentTProposal");
    const double scale = std::sqrt(s * nu / rng.chi_squared(nu));
    Vector x = y;
    for (Eigen::Index k = 0; k < x.size(); ++k) x[k] += scale * rng.normal();
    return x;
  }
};

using Proposal = std::variant<BrownianProposal, StudentTProposal>;

inline Vector sample_proposal(const Proposal& proposal, double s, const Vector& y, RngStream& rng) {
  return std::visit([&](const auto& p) { return p.sample(s, y, rng); }, proposal);
}

inline double proposal_density(const Proposal& proposal, double s, const Vector& x, const Vector& y) {
  return std::visit([&](const auto& p) { return p.density(s, x, y); }, proposal);
}

}  // namespace ctmc::cis

#endif  // CTMC_CIS_PROPOSAL_HPP

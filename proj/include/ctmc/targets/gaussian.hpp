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

#ifndef CTMC_TARGETS_GAUSSIAN_HPP
#define CTMC_TARGETS_GAUSSIAN_HPP

#include <ctmc/errors.hpp>
#include <ctmc/linalg.hpp>

#include <cmath>
#include <vector>

namespace ctmc::targets {

/// Product of Gaussian factors exp(-(x - m_i)' P_i (x - m_i) / 2); the product is Gaussian.
/**
 * Used as a closed-form reference target. With a single factor it is N(mean, P^-1); with
 * several it exercises the sub-sampling estimators on a target whose moments are known.
 */
class GaussianTarget {
 public:
  GaussianTarget(std::vector<Vector> means, std::vector<Matrix> precisions)
      : means_{std::move(means)}, precisions_{std::move(precisions)} {
    if (means_.empty() || means_.size() != precisions_.size()) {
      throw ContractViolation{"GaussianTarget: need one precision per factor mean"};
    }
    const auto d = means_.front().size();
    precision_ = Matrix::Zero(d, d);
    Vector weighted = Vector::Zero(d);
    for (std::size_t i = 0; i < means_.size(); ++i) {
      if (means_[i].size() != d || precisions_[i].rows() != d || precisions_[i].cols() != d) {
        throw ContractViolation{"GaussianTarget: inconsistent dimensions"};
      }
      precision_ += precisions_[i];
      weighted += precisions_[i] * means_[i];
    }
    const Eigen::LLT<Matrix> llt{precision_};
    if (llt.info() != Eigen::Success) {
      throw ContractViolation{"GaussianTarget: total precision is not positive definite"};
    }
    mean_ = llt.solve(weighted);
    covariance_ = llt.solve(Matrix::Identity(d, d));
  }

  /// Single-factor N(mean, covariance).
  static GaussianTarget from_moments(const Vector& mean, const Matrix& covariance) {
    return GaussianTarget{{mean}, {covariance.inverse()}};
  }

  static GaussianTarget standard(std::size_t dimension) {
    const auto d = static_cast<Eigen::Index>(dimension);
    return GaussianTarget{{Vector::Zero(d)}, {Matrix::Identity(d, d)}};
  }

  [[nodiscard]] std::size_t dimension() const { return static_cast<std::size_t>(mean_.size()); }
  [[nodiscard]] std::size_t factor_count() const { return means_.size(); }

  [[nodiscard]] double log_factor(std::size_t i, const Vector& x) const {
    const Vector r = x - means_[i];
    return -0.5 * r.dot(precisions_[i] * r);
  }
  [[nodiscard]] Vector grad_log_factor(std::size_t i, const Vector& x) const {
    return -(precisions_[i] * (x - means_[i]));
  }
  [[nodiscard]] Vector second_deriv_diag_factor(std::size_t i, const Vector&) const {
    return -precisions_[i].diagonal();
  }

  [[nodiscard]] double log_pi(const Vector& x) const {
    const Vector r = x - mean_;
    return -0.5 * r.dot(precision_ * r);
  }
  [[nodiscard]] Vector grad_log_pi(const Vector& x) const { return -(precision_ * (x - mean_)); }
  [[nodiscard]] Vector second_deriv_diag(const Vector&) const { return -precision_.diagonal(); }

  // Scalar accessors; meaningful for one-dimensional targets only.
  [[nodiscard]] double factor_log(std::size_t i, double x) const {
    const double r = x - means_[i][0];
    return -0.5 * precisions_[i](0, 0) * r * r;
  }
  [[nodiscard]] double factor_grad(std::size_t i, double x) const { return -precisions_[i](0, 0) * (x - means_[i][0]); }
  [[nodiscard]] double factor_second(std::size_t i, double) const { return -precisions_[i](0, 0); }

  [[nodiscard]] const Vector& mean() const noexcept { return mean_; }
  [[nodiscard]] const Matrix& precision() const noexcept { return precision_; }
  [[nodiscard]] const Matrix& covariance() const noexcept { return covariance_; }
  [[nodiscard]] const Vector& factor_mean(std::size_t i) const { return means_[i]; }
  [[nodiscard]] const Matrix& factor_precision(std::size_t i) const { return precisions_[i]; }

 private:
  std::vector<Vector> means_;
  std::vector<Matrix> precisions_;
  Matrix precision_;
  Vector mean_;
  Matrix covariance_;
};

}  // namespace ctmc::targets

#endif  // CTMC_TARGETS_GAUSSIAN_HPP

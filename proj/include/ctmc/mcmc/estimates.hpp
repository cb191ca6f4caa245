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

#ifndef CTMC_MCMC_ESTIMATES_HPP
#define CTMC_MCMC_ESTIMATES_HPP

#include <ctmc/errors.hpp>
#include <ctmc/linalg.hpp>
#include <ctmc/pdp/skeleton.hpp>

#include <array>
#include <cmath>
#include <functional>
#include <vector>

namespace ctmc::mcmc {

/// g(x) = c0 + c1 . x + x' c2 x; path integrals of such g are evaluated in closed form.
struct QuadraticFunction {
  double c0 = 0.0;
  Vector c1;
  Matrix c2;

  [[nodiscard]] double operator()(const Vector& x) const {
    double value = c0;
    if (c1.size() > 0) value += c1.dot(x);
    if (c2.size() > 0) value += x.dot(c2 * x);
    return value;
  }

  /// Integral of g(x + s v) over s in [0, length].
  [[nodiscard]] double segment_integral(const Vector& x, const Vector& v, double length) const {
    const double l2 = length * length;
    double total = c0 * length;
    if (c1.size() > 0) total += c1.dot(x) * length + c1.dot(v) * l2 / 2.0;
    if (c2.size() > 0) {
      total += x.dot(c2 * x) * length + (x.dot(c2 * v) + v.dot(c2 * x)) * l2 / 2.0 + v.dot(c2 * v) * l2 * length / 3.0;
    }
    return total;
  }

  /// The k-th power (k <= 2) of coordinate j.
  static QuadraticFunction coordinate_power(std::size_t dimension, std::size_t j, int k) {
    const auto d = static_cast<Eigen::Index>(dimension);
    const auto jj = static_cast<Eigen::Index>(j);
    QuadraticFunction g{0.0, Vector::Zero(d), Matrix::Zero(d, d)};
    switch (k) {
      case 0: g.c0 = 1.0; break;
      case 1: g.c1[jj] = 1.0; break;
      case 2: g.c2(jj, jj) = 1.0; break;
      default: throw ContractViolation{"coordinate_power: degree must be 0, 1 or 2"};
    }
    return g;
  }
};

namespace detail {

inline void check_burn_in(const pdp::Skeleton& skeleton, double burn_in) {
  if (!(burn_in >= 0.0) || burn_in >= skeleton.horizon()) {
    throw RangeError{"burn-in must lie in [0, T)"};
  }
}

// Visits the part of every segment after burn-in as (x at start, v, length).
template <class Visit>
void for_each_segment_after(const pdp::Skeleton& skeleton, double burn_in, Visit&& visit) {
  for (std::size_t k = 0; k + 1 < skeleton.size(); ++k) {
    const double t0 = skeleton.time(k);
    const double t1 = skeleton.time(k + 1);
    if (t1 <= burn_in) continue;
    const double start = std::max(t0, burn_in);
    const Vector v = skeleton.velocity(k);
    const Vector x = skeleton.position(k) + (start - t0) * v;
    visit(x, v, t1 - start);
  }
}

inline constexpr std::array<double, 5> kGaussNodes{-0.9061798459386640, -0.5384693101056831, 0.0,
                                                  0.5384693101056831, 0.9061798459386640};
inline constexpr std::array<double, 5> kGaussWeights{0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                                    0.4786286704993665, 0.2369268850561891};

inline double gauss_legendre(const std::function<double(double)>& f, double a, double b) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double total = 0.0;
  for (std::size_t k = 0; k < kGaussNodes.size(); ++k) total += kGaussWeights[k] * f(mid + half * kGaussNodes[k]);
  return half * total;
}

inline double adaptive_gauss_legendre(const std::function<double(double)>& f, double a, double b, double whole,
                                      double tolerance, int depth) {
  const double mid = 0.5 * (a + b);
  const double left = gauss_legendre(f, a, mid);
  const double right = gauss_legendre(f, mid, b);
  if (depth <= 0 || std::abs(left + right - whole) <= tolerance * std::max(1.0, std::abs(left + right))) {
    return left + right;
  }
  return adaptive_gauss_legendre(f, a, mid, left, tolerance, depth - 1) +
         adaptive_gauss_legendre(f, mid, b, right, tolerance, depth - 1);
}

}  // namespace detail

/// Time average of g along the path after burn-in, each segment by adaptive Gauss-Legendre.
inline double path_integral_estimate(const pdp::Skeleton& skeleton, const std::function<double(const Vector&)>& g,
                                     double burn_in = 0.0, double tolerance = 1e-10) {
  detail::check_burn_in(skeleton, burn_in);
  double total = 0.0;
  detail::for_each_segment_after(skeleton, burn_in, [&](const Vector& x, const Vector& v, double length) {
    const std::function<double(double)> along = [&](double s) { return g(x + s * v); };
    total += detail::adaptive_gauss_legendre(along, 0.0, length, detail::gauss_legendre(along, 0.0, length),
                                             tolerance, 30);
  });
  return total / (skeleton.horizon() - burn_in);
}

/// Time average of a quadratic g along the path after burn-in, in closed form.
inline double path_integral_estimate(const pdp::Skeleton& skeleton, const QuadraticFunction& g, double burn_in = 0.0) {
  detail::check_burn_in(skeleton, burn_in);
  double total = 0.0;
  detail::for_each_segment_after(skeleton, burn_in, [&](const Vector& x, const Vector& v, double length) {
    total += g.segment_integral(x, v, length);
  });
  return total / (skeleton.horizon() - burn_in);
}

/// Positions at times burn_in + j h, j = 1..M, with h = (T - burn_in) / M.
inline std::vector<Vector> discretized_positions(const pdp::Skeleton& skeleton, std::size_t m, double burn_in = 0.0) {
  if (m == 0) {
    throw ContractViolation{"discretized_positions: M must be at least 1"};
  }
  detail::check_burn_in(skeleton, burn_in);
  const double h = (skeleton.horizon() - burn_in) / static_cast<double>(m);
  std::vector<Vector> out;
  out.reserve(m);
  std::size_t k = 0;
  for (std::size_t j = 1; j <= m; ++j) {
    const double t = j == m ? skeleton.horizon() : burn_in + static_cast<double>(j) * h;
    while (k + 2 < skeleton.size() && skeleton.time(k + 1) <= t) ++k;
    out.emplace_back(skeleton.position(k) + (t - skeleton.time(k)) * skeleton.velocity(k));
  }
  return out;
}

/// (1/M) sum_j g(x at burn_in + j h).
inline double discretized_estimate(const pdp::Skeleton& skeleton, const std::function<double(const Vector&)>& g,
                                   std::size_t m, double burn_in = 0.0) {
  double total = 0.0;
  for (const auto& x : discretized_positions(skeleton, m, burn_in)) total += g(x);
  return total / static_cast<double>(m);
}

/// Coordinate j sampled every `spacing` time units after burn-in.
inline std::vector<double> unit_time_samples(const pdp::Skeleton& skeleton, double burn_in = 0.0,
                                             std::size_t coordinate = 0, double spacing = 1.0) {
  const auto m = static_cast<std::size_t>(std::floor((skeleton.horizon() - burn_in) / spacing + 1e-9));
  if (m == 0) {
    return {};
  }
  std::vector<double> out;
  out.reserve(m);
  std::size_t k = 0;
  const auto j = static_cast<Eigen::Index>(coordinate);
  for (std::size_t i = 1; i <= m; ++i) {
    const double t = std::min(skeleton.horizon(), burn_in + static_cast<double>(i) * spacing);
    while (k + 2 < skeleton.size() && skeleton.time(k + 1) <= t) ++k;
    out.push_back(skeleton.position(k)[j] + (t - skeleton.time(k)) * skeleton.velocity(k)[j]);
  }
  return out;
}

}  // namespace ctmc::mcmc

#endif  // CTMC_MCMC_ESTIMATES_HPP

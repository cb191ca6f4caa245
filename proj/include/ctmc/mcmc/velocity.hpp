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

#ifndef CTMC_MCMC_VELOCITY_HPP
#define CTMC_MCMC_VELOCITY_HPP

#include <ctmc/errors.hpp>
#include <ctmc/linalg.hpp>
#include <ctmc/rng.hpp>

#include <algorithm>

namespace ctmc::mcmc {

/// max{0, -v . g} for g = grad log pi(x).
inline double canonical_rate(const Vector& g, const Vector& v) { return std::max(0.0, -v.dot(g)); }

/// Reflection of v in the hyperplane orthogonal to g.
inline Vector bps_flip(const Vector& g, const Vector& v) {
  const double gg = g.squaredNorm();
  if (!(gg > 0.0)) {
    throw DomainError{"bps_flip: gradient is zero, the reflection is undefined"};
  }
  return v - (2.0 * v.dot(g) / gg) * g;
}

/// Per-coordinate canonical Zig-Zag rates max{0, -theta_i g_i}.
inline Vector zigzag_coordinate_rates(const Vector& g, const Vector& theta) {
  return (-theta.cwiseProduct(g)).cwiseMax(0.0);
}

/// theta with coordinate i negated.
inline Vector zigzag_flip(const Vector& theta, std::size_t i) {
  Vector out = theta;
  out[static_cast<Eigen::Index>(i)] = -out[static_cast<Eigen::Index>(i)];
  return out;
}

/// Uniform draw on the unit sphere in d dimensions.
inline Vector uniform_unit_vector(std::size_t d, RngStream& rng) {
  Vector v(static_cast<Eigen::Index>(d));
  double norm = 0.0;
  do {
    for (Eigen::Index k = 0; k < v.size(); ++k) v[k] = rng.normal();
    norm = v.norm();
  } while (!(norm > 0.0));
  return v / norm;
}

}  // namespace ctmc::mcmc

#endif  // CTMC_MCMC_VELOCITY_HPP

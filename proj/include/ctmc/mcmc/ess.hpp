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

#ifndef CTMC_MCMC_ESS_HPP
#define CTMC_MCMC_ESS_HPP

#include <ctmc/errors.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

namespace ctmc::mcmc {

/// Effective sample size with Geyer's initial positive sequence truncation.
/**
 * tau = -1 + 2 sum_m (gamma_{2m} + gamma_{2m+1}) / gamma_0, summed while the pair sums stay
 * positive (the first pair is always kept), and ESS = N / tau. tau is floored at 1 / log10(N) so
 * that antithetic series give a finite ESS above N. A constant series has ESS = N.
 */
inline double ess(const std::vector<double>& series) {
  const std::size_t n = series.size();
  if (n < 10) {
    throw ContractViolation{"ess: need at least 10 samples"};
  }
  double mean = 0.0;
  for (double x : series) mean += x;
  mean /= static_cast<double>(n);
  std::vector<double> centered(n);
  for (std::size_t t = 0; t < n; ++t) centered[t] = series[t] - mean;

  const auto autocovariance = [&](std::size_t lag) {
    double total = 0.0;
    for (std::size_t t = 0; t + lag < n; ++t) total += centered[t] * centered[t + lag];
    return total / static_cast<double>(n);
  };
  const double gamma0 = autocovariance(0);
  if (!(gamma0 > 0.0)) {
    return static_cast<double>(n);
  }
  double pair_sum = 0.0;
  for (std::size_t m = 0; 2 * m + 1 < n; ++m) {
    const double pair = autocovariance(2 * m) + autocovariance(2 * m + 1);
    if (m > 0 && !(pair > 0.0)) break;
    pair_sum += pair;
  }
  const double tau = std::max(-1.0 + 2.0 * pair_sum / gamma0, 1.0 / std::log10(static_cast<double>(n)));
  return static_cast<double>(n) / tau;
}

}  // namespace ctmc::mcmc

#endif  // CTMC_MCMC_ESS_HPP

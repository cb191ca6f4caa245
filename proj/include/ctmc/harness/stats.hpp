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

#ifndef CTMC_HARNESS_STATS_HPP
#define CTMC_HARNESS_STATS_HPP

#include <ctmc/errors.hpp>
#include <ctmc/mcmc/ess.hpp>
#include <ctmc/mcmc/estimates.hpp>
#include <ctmc/mcmc/sampler.hpp>

#include <cstddef>
#include <iomanip>
#include <ostream>
#include <string>

namespace ctmc::harness {

/// Table 1 style efficiency summary of one run.
/**
 * t_per_ess is the post-burn-in time per effective sample of unit-time positions;
 * iters_per_unit_time counts thinning proposals per unit time over the whole run. The per-ESS
 * costs are defined as products so that iters_per_ess = t_per_ess * iters_per_unit_time holds
 * exactly.
 */
struct SummaryStats {
  double ess = 0.0;
  double t_per_ess = 0.0;
  double iters_per_unit_time = 0.0;
  double iters_per_ess = 0.0;
  double factor_evals = 0.0;
  double factor_evals_per_ess = 0.0;
  double negative_weight_fraction = 0.0;
  double wall_time = 0.0;
};

inline SummaryStats make_summary(double horizon, double burn_in, double ess, double proposals, double factor_evals) {
  if (!(horizon > 0.0) || !(burn_in >= 0.0 && burn_in < horizon)) {
    throw ContractViolation{"make_summary: need 0 <= burn_in < horizon"};
  }
  if (!(ess > 0.0)) {
    throw ContractViolation{"make_summary: effective sample size must be positive"};
  }
  SummaryStats s;
  s.ess = ess;
  s.t_per_ess = (horizon - burn_in) / ess;
  s.iters_per_unit_time = proposals / horizon;
  s.iters_per_ess = s.t_per_ess * s.iters_per_unit_time;
  s.factor_evals = factor_evals;
  s.factor_evals_per_ess = s.t_per_ess * (factor_evals / horizon);
  return s;
}

/// Summary of a one-dimensional (or first-coordinate) CT-MCMC run.
inline SummaryStats summarize_ctmcmc(const mcmc::CtmcmcResult& result, double burn_in_fraction) {
  const double horizon = result.skeleton.horizon();
  const double burn_in = burn_in_fraction * horizon;
  const auto samples = mcmc::unit_time_samples(result.skeleton, burn_in);
  if (samples.size() < 10) {
    throw ConfigError{"run too short for an ESS estimate: need at least 10 unit-time samples after burn-in"};
  }
  return make_summary(horizon, burn_in, mcmc::ess(samples), static_cast<double>(result.cost.proposals),
                      static_cast<double>(result.cost.factor_evals));
}

inline constexpr const char* kSummaryHeader = "n,algo,estimator,bound,t_per_ess,iters_per_unit_time,iters_per_ess,factor_evals";

inline void write_summary_row(std::ostream& os, std::size_t n, const std::string& algo, const std::string& estimator,
                              const std::string& bound, const SummaryStats& s) {
  os << std::setprecision(10) << n << ',' << algo << ',' << estimator << ',' << bound << ',' << s.t_per_ess << ','
     << s.iters_per_unit_time << ',' << s.iters_per_ess << ',' << std::setprecision(15) << s.factor_evals << '\n';
}

}  // namespace ctmc::harness

#endif  // CTMC_HARNESS_STATS_HPP

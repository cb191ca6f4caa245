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

#ifndef CTMC_CIS_VARIANCE_STUDY_HPP
#define CTMC_CIS_VARIANCE_STUDY_HPP

#include <ctmc/cis/cis.hpp>
#include <ctmc/cis/rho.hpp>
#include <ctmc/errors.hpp>
#include <ctmc/rng.hpp>
#include <ctmc/targets/bounds.hpp>
#include <ctmc/targets/control_variate.hpp>
#include <ctmc/targets/mixture.hpp>
#include <ctmc/targets/posterior.hpp>

#include <functional>
#include <iomanip>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

namespace ctmc::cis {

struct VarianceStudyConfig {
  std::vector<std::size_t> ns{150, 1500, 15000};
  std::vector<double> xhat_offsets{0.0, 1.0, 3.0};
  std::size_t replicates = 1000;
  double x_true = 4.0;
  double p = 0.95;
  /// Dataset of size n; when empty the data come from the study's stream.
  std::function<std::vector<double>(std::size_t n)> data;
};

struct VarianceRow {
  std::size_t n = 0;
  std::string policy;
  double xhat_offset = 0.0;
  double var_Wh = 0.0;
  double data_accesses = 0.0;
  std::size_t replicates = 0;
};

/// Variance of W_h over replicate CIS runs of length h started from x ~ posterior.
inline VarianceRow weight_variance(const targets::PosteriorQuadrature& posterior,
                                   const RhoFn& rho, const EventRate& rate, double h, std::size_t replicates,
                                   RngStream& rng) {
  VarianceRow row;
  row.replicates = replicates;
  double sum = 0.0;
  double sum_sq = 0.0;
  double accesses = 0.0;
  for (std::size_t r = 0; r < replicates; ++r) {
    RngStream local = rng.substream(r);
    const Vector x0 = Vector::Constant(1, posterior.sample(local));
    const auto run = run_cis(x0, BrownianProposal{}, rho, rate, h, local, false);
    sum += run.particle.w;
    sum_sq += run.particle.w * run.particle.w;
    accesses += static_cast<double>(run.counters.data_accesses);
  }
  const double m = static_cast<double>(replicates);
  row.var_Wh = (sum_sq - sum * sum / m) / (m - 1.0);
  row.data_accesses = accesses / m;
  return row;
}

/// For each n: SCALE without sub-sampling at rate n/2, and control-variate SCALE at rate
/// 2n + 4n^2 (y - x_hat)^2 with x_hat = mode + offset * sd, all over h = 1/n.
inline std::vector<VarianceRow> variance_study(const VarianceStudyConfig& config, RngStream& rng) {
  if (config.replicates < 2) {
    throw ConfigError{"variance_study: need at least two replicates"};
  }
  std::vector<VarianceRow> rows;
  for (std::size_t n : config.ns) {
    RngStream data_rng = rng.substream(n);
    targets::MixtureParams params;
    params.p = config.p;
    const targets::MixtureTarget target{
        config.data ? config.data(n) : targets::simulate_mixture_data(n, data_rng, config.x_true, config.p), params};
    const auto interval = targets::search_interval(target.data());
    const auto posterior = targets::posterior_quadrature(target, interval.lo, interval.hi);
    const double nn = static_cast<double>(n);
    const double h = 1.0 / nn;

    RngStream none_rng = rng.substream(n + 1);
    auto row = weight_variance(posterior, exact_scale_rho(target),
                               constant_event_rate(nn / 2.0), h, config.replicates, none_rng);
    row.n = n;
    row.policy = "none";
    rows.push_back(row);

    for (std::size_t o = 0; o < config.xhat_offsets.size(); ++o) {
      const double offset = config.xhat_offsets[o];
      const Vector x_hat = Vector::Constant(1, posterior.mode() + offset * posterior.sd());
      auto cache = std::make_shared<const targets::ControlVariateCache>(targets::make_control_variate_cache(target, x_hat));
      RngStream cv_rng = rng.substream(n + 2 + o);
      auto cv_row = weight_variance(posterior, cv_scale_rho(target, cache),
                                    anchored_quadratic_rate(2.0 * nn, 4.0 * nn * nn, x_hat), h, config.replicates,
                                    cv_rng);
      cv_row.n = n;
      cv_row.policy = "cv";
      cv_row.xhat_offset = offset;
      rows.push_back(cv_row);
    }
  }
  return rows;
}

inline void write_variance_csv(std::ostream& os, const std::vector<VarianceRow>& rows) {
  os << "n,policy,xhat_offset,var_Wh,data_accesses,replicates\n";
  os << std::setprecision(10);
  for (const auto& r : rows) {
    os << r.n << ',' << r.policy << ',' << r.xhat_offset << ',' << r.var_Wh << ',' << r.data_accesses << ','
       << r.replicates << '\n';
  }
}

}  // namespace ctmc::cis

#endif  // CTMC_CIS_VARIANCE_STUDY_HPP

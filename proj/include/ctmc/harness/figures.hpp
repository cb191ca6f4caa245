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

#ifndef CTMC_HARNESS_FIGURES_HPP
#define CTMC_HARNESS_FIGURES_HPP

#include <ctmc/harness/artifacts.hpp>
#include <ctmc/harness/config.hpp>
#include <ctmc/harness/experiment.hpp>
#include <ctmc/harness/problem.hpp>
#include <ctmc/mcmc/estimators.hpp>
#include <ctmc/mcmc/velocity.hpp>
#include <ctmc/targets/control_variate.hpp>

#include <filesystem>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace ctmc::harness {

/// Evenly spaced points over the posterior mean +- 4 sd.
inline std::vector<double> posterior_grid(const targets::PosteriorQuadrature& posterior, std::size_t points) {
  std::vector<double> xs(points);
  const double lo = posterior.mean() - 4.0 * posterior.sd();
  const double hi = posterior.mean() + 4.0 * posterior.sd();
  for (std::size_t k = 0; k < points; ++k) {
    xs[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(points - 1);
  }
  return xs;
}

struct RatePoint {
  double x = 0.0;
  double grad = 0.0;
  /// Canonical, expected simple sub-sampling and expected control-variate switching rates for v = +1 and v = -1.
  double canonical[2] = {0.0, 0.0};
  double simple[2] = {0.0, 0.0};
  double cv[2] = {0.0, 0.0};
};

/// Switching-rate curves on a grid; expectations enumerate the factor index.
inline std::vector<RatePoint> rate_curves(const MixtureProblem& problem, const std::vector<double>& xs) {
  const mcmc::RateEstimator simple = mcmc::SimpleEstimator{};
  const mcmc::RateEstimator cv = mcmc::CvEstimator{problem.cv_cache()};
  std::vector<RatePoint> out;
  out.reserve(xs.size());
  for (double x : xs) {
    RatePoint p;
    p.x = x;
    const Vector at = Vector::Constant(1, x);
    const Vector g = targets::grad_log_pi(problem.target(), at);
    p.grad = g[0];
    for (int k = 0; k < 2; ++k) {
      const Vector v = Vector::Constant(1, k == 0 ? 1.0 : -1.0);
      p.canonical[k] = mcmc::canonical_rate(g, v);
      p.simple[k] = mcmc::expected_random_rate(simple, problem.target(), at, v);
      p.cv[k] = mcmc::expected_random_rate(cv, problem.target(), at, v);
    }
    out.push_back(p);
  }
  return out;
}

struct RhoVariancePoint {
  double x = 0.0;
  double var_simple = 0.0;
  double var_cv = 0.0;
};

/// Variance over uniform independent (j, k) of the sub-sampled and control-variate SCALE rate
/// estimators, in closed form from per-factor moments (O(n) per point, one-dimensional).
inline RhoVariancePoint rho_variance(const targets::MixtureTarget& target, const targets::ControlVariateCache& cache,
                                     double x) {
  const std::size_t count = target.factor_count();
  const double n = static_cast<double>(count);
  const double G = cache.grad_at_hat[0];
  // Simple: X = A_j + B g_j g_k with A_j = -n h_j / 2 and B = -n^2 / 2.
  // Control variates: X = a_j + b d_j d_k + rho_hat with a_j = -n c_j / 2 - n d_j G and b = -n^2 / 2.
  double eg = 0.0, eg2 = 0.0, ea = 0.0, ea2 = 0.0, eag = 0.0;
  double ed = 0.0, ed2 = 0.0, ec = 0.0, ec2 = 0.0, ecd = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double g = target.factor_grad(i, x);
    const double h = target.factor_second(i, x);
    const double a = -0.5 * n * h;
    eg += g;
    eg2 += g * g;
    ea += a;
    ea2 += a * a;
    eag += a * g;
    const double d = g - cache.per_factor_grad_at_hat[i][0];
    const double c = -0.5 * n * (h - cache.per_factor_second_at_hat[i][0]) - n * d * G;
    ed += d;
    ed2 += d * d;
    ec += c;
    ec2 += c * c;
    ecd += c * d;
  }
  eg /= n, eg2 /= n, ea /= n, ea2 /= n, eag /= n, ed /= n, ed2 /= n, ec /= n, ec2 /= n, ecd /= n;
  const double b = -0.5 * n * n;
  const double mean_simple = ea + b * eg * eg;
  const double second_simple = ea2 + 2.0 * b * eag * eg + b * b * eg2 * eg2;
  const double mean_cv = ec + b * ed * ed;
  const double second_cv = ec2 + 2.0 * b * ecd * ed + b * b * ed2 * ed2;
  return {x, second_simple - mean_simple * mean_simple, second_cv - mean_cv * mean_cv};
}

/// The `export` command: writes <kind>.csv and the manifest.
inline std::string export_figure_data(const ExperimentConfig& config) {
  config.validate();
  const std::filesystem::path dir{config.out};
  const auto problem = make_problem(config, config.n, dir);
  std::ostringstream csv;
  csv << std::setprecision(12);
  if (config.kind == "rates_curves") {
    csv << "x,grad_log_pi,canonical_pos,simple_pos,cv_pos,canonical_neg,simple_neg,cv_neg\n";
    for (const auto& p : rate_curves(*problem, posterior_grid(problem->posterior(), config.grid))) {
      csv << p.x << ',' << p.grad << ',' << p.canonical[0] << ',' << p.simple[0] << ',' << p.cv[0] << ','
          << p.canonical[1] << ',' << p.simple[1] << ',' << p.cv[1] << '\n';
    }
  } else if (config.kind == "variance_curves") {
    const auto cache = problem->cv_cache();
    csv << "x,var_rho_simple,var_rho_cv,x_hat\n";
    for (double x : posterior_grid(problem->posterior(), config.grid)) {
      const auto v = rho_variance(problem->target(), *cache, x);
      csv << v.x << ',' << v.var_simple << ',' << v.var_cv << ',' << cache->x_hat[0] << '\n';
    }
  } else {
    const auto run = run_smc_experiment(config, *problem);
    write_histogram_csv(csv, run.histogram, problem->posterior());
  }
  const std::string name = config.kind + ".csv";
  write_file_atomic(dir / name, csv.str());
  write_manifest(dir, "export", config, {name});
  return name;
}

}  // namespace ctmc::harness

#endif  // CTMC_HARNESS_FIGURES_HPP

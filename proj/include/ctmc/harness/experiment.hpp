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

#ifndef CTMC_HARNESS_EXPERIMENT_HPP
#define CTMC_HARNESS_EXPERIMENT_HPP

#include <ctmc/cis/cis.hpp>
#include <ctmc/cis/proposal.hpp>
#include <ctmc/cis/rho.hpp>
#include <ctmc/cis/smc.hpp>
#include <ctmc/cis/variance_study.hpp>
#include <ctmc/errors.hpp>
#include <ctmc/harness/artifacts.hpp>
#include <ctmc/harness/config.hpp>
#include <ctmc/harness/problem.hpp>
#include <ctmc/harness/stats.hpp>
#include <ctmc/mcmc/bound_policy.hpp>
#include <ctmc/mcmc/estimators.hpp>
#include <ctmc/mcmc/sampler.hpp>
#include <ctmc/pdp/skeleton_io.hpp>
#include <ctmc/rng.hpp>
#include <ctmc/targets/gaussian.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace ctmc::harness {

/// Stream for the stochastic part of a run; the dataset for a seed does not depend on it.
inline RngStream run_stream(const ExperimentConfig& config) { return RngStream{config.seed, config.stream + 1}; }

inline mcmc::SamplerKind make_sampler(const ExperimentConfig& config) {
  if (config.algo == "bps") return mcmc::Bps{config.refresh_rate};
  if (config.algo == "zigzag") return mcmc::ZigZag{};
  return mcmc::PureReflection{config.algo == "reflect" && config.target == "gaussian" && config.dim > 1
                                  ? config.refresh_rate
                                  : 0.0};
}

inline mcmc::RateEstimator make_estimator(const ExperimentConfig& config, const MixtureProblem& problem) {
  if (config.estimator == "simple") return mcmc::SimpleEstimator{};
  if (config.estimator == "nonuniform") return mcmc::NonUniformEstimator{problem.table().per_factor_max_abs_grad};
  if (config.estimator == "cv") return mcmc::CvEstimator{problem.cv_cache()};
  if (config.estimator == "hybrid") return mcmc::HybridEstimator{problem.cv_cache(), config.hybrid_k};
  return mcmc::ExactEstimator{};
}

inline mcmc::BoundPolicy make_bound(const ExperimentConfig& config, const MixtureProblem& problem) {
  if (config.bound == "simple") return mcmc::simple_global_bound(problem.table());
  if (config.bound == "max") {
    const auto& t = problem.target();
    return mcmc::max_gradient_bound([&t](double x) { return targets::scalar_log_pi(t, x); },
                                    [&t](double x) { return targets::scalar_grad_log_pi(t, x); },
                                    problem.interval().lo, problem.interval().hi);
  }
  if (config.bound == "cv") return mcmc::cv_bound(problem.cv_cache(), problem.table());
  if (config.bound == "hybrid") return mcmc::hybrid_bound(problem.cv_cache(), problem.table(), config.hybrid_k);
  return mcmc::sum_global_bound(problem.table());
}

struct SampleRun {
  std::size_t n = 0;
  mcmc::CtmcmcResult result;
  SummaryStats stats;
};

namespace detail {

template <class Clock = std::chrono::steady_clock>
double seconds_since(typename Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

inline Vector initial_velocity(const ExperimentConfig& config, std::size_t d, RngStream& rng) {
  if (config.algo == "zigzag") return Vector::Ones(static_cast<Eigen::Index>(d));
  if (config.algo == "bps" && d > 1) return mcmc::uniform_unit_vector(d, rng);
  Vector v = Vector::Zero(static_cast<Eigen::Index>(d));
  v[0] = 1.0;
  return v;
}

}  // namespace detail

/// Continuous-time MCMC on the mixture posterior of `problem` over [0, horizon].
inline SampleRun run_sample(const ExperimentConfig& config, const MixtureProblem& problem, double horizon) {
  const auto start = std::chrono::steady_clock::now();
  RngStream rng = run_stream(config);
  const Vector x0 =
      Vector::Constant(1, config.x0 == "mode" ? problem.posterior().mode() : detail::parse_double("x0", config.x0));
  const Vector v0 = detail::initial_velocity(config, 1, rng);
  SampleRun run;
  run.n = problem.n();
  run.result = mcmc::run_ctmcmc(make_sampler(config), make_estimator(config, problem), make_bound(config, problem),
                                problem.target(), x0, v0, horizon, rng,
                                mcmc::SamplerOptions{config.epsilon});
  run.stats = summarize_ctmcmc(run.result, config.burn_in);
  run.stats.wall_time = detail::seconds_since(start);
  return run;
}

/// Exact-rate sampler on a standard Gaussian in `dim` dimensions.
inline SampleRun run_sample_gaussian(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  RngStream rng = run_stream(config);
  const auto target = targets::GaussianTarget::standard(config.dim);
  const Vector x0 = config.x0 == "mode" ? Vector::Zero(static_cast<Eigen::Index>(config.dim))
                                        : Vector::Constant(static_cast<Eigen::Index>(config.dim),
                                                           detail::parse_double("x0", config.x0));
  const Vector v0 = detail::initial_velocity(config, config.dim, rng);
  SampleRun run;
  run.n = target.factor_count();
  run.result = mcmc::run_ctmcmc(make_sampler(config), mcmc::ExactEstimator{}, mcmc::gaussian_exact_bound(target),
                                target, x0, v0, config.T, rng, mcmc::SamplerOptions{config.epsilon});
  run.stats = summarize_ctmcmc(run.result, config.burn_in);
  run.stats.wall_time = detail::seconds_since(start);
  return run;
}

/// The `sample` command: skeleton.jsonl, summary.csv and the manifest under config.out.
inline SummaryStats run_experiment(const ExperimentConfig& config) {
  config.validate();
  const std::filesystem::path dir{config.out};
  SampleRun run;
  if (config.target == "gaussian") {
    run = run_sample_gaussian(config);
  } else {
    const auto problem = make_problem(config, config.n, dir);
    run = run_sample(config, *problem, config.T);
  }
  std::ostringstream skeleton;
  pdp::write_skeleton_jsonl(skeleton, run.result.skeleton, config.seed, config.stream);
  std::ostringstream summary;
  summary << kSummaryHeader << '\n';
  write_summary_row(summary, run.n, config.algo, config.estimator, config.bound, run.stats);
  write_file_atomic(dir / "skeleton.jsonl", skeleton.str());
  write_file_atomic(dir / "summary.csv", summary.str());
  write_manifest(dir, "sample", config, {"skeleton.jsonl", "summary.csv"});
  return run.stats;
}

/// Weighted histogram of SMC snapshots against the quadrature posterior.
struct PosteriorHistogram {
  std::vector<double> edges;
  /// Estimated mass per bin, each snapshot's weights normalized to sum to one, averaged over snapshots.
  std::vector<double> estimate;
  /// Estimated mass outside the edges.
  double outside = 0.0;
  std::size_t snapshots = 0;
};

inline constexpr std::size_t kHistogramBins = 20;

/// Bins spanning the posterior mean +- 4 sd.
inline std::vector<double> posterior_bin_edges(const targets::PosteriorQuadrature& posterior,
                                               std::size_t bins = kHistogramBins) {
  const double lo = posterior.mean() - 4.0 * posterior.sd();
  const double hi = posterior.mean() + 4.0 * posterior.sd();
  std::vector<double> edges(bins + 1);
  for (std::size_t b = 0; b <= bins; ++b) edges[b] = lo + (hi - lo) * static_cast<double>(b) / static_cast<double>(bins);
  return edges;
}

inline PosteriorHistogram weighted_histogram(const std::vector<cis::SmcSnapshot>& snapshots, double t_min,
                                             std::vector<double> edges) {
  PosteriorHistogram h;
  h.edges = std::move(edges);
  const std::size_t bins = h.edges.size() - 1;
  h.estimate.assign(bins, 0.0);
  const double lo = h.edges.front();
  const double width = (h.edges.back() - lo) / static_cast<double>(bins);
  for (const auto& s : snapshots) {
    if (s.t < t_min) continue;
    double total = 0.0;
    for (double w : s.w) total += w;
    if (total == 0.0) continue;
    ++h.snapshots;
    for (std::size_t i = 0; i < s.w.size(); ++i) {
      const double x = s.x[i][0];
      const double share = s.w[i] / total;
      const double pos = (x - lo) / width;
      if (pos < 0.0 || pos >= static_cast<double>(bins)) {
        h.outside += share;
      } else {
        h.estimate[static_cast<std::size_t>(pos)] += share;
      }
    }
  }
  if (h.snapshots > 0) {
    for (double& e : h.estimate) e /= static_cast<double>(h.snapshots);
    h.outside /= static_cast<double>(h.snapshots);
  }
  return h;
}

/// Half the L1 distance between the binned estimate and the posterior, with the outside mass as one more bin.
inline double total_variation(const PosteriorHistogram& h, const targets::PosteriorQuadrature& posterior) {
  double sum = 0.0;
  double inside = 0.0;
  for (std::size_t b = 0; b + 1 < h.edges.size(); ++b) {
    const double mass = posterior.cdf(h.edges[b + 1]) - posterior.cdf(h.edges[b]);
    inside += mass;
    sum += std::abs(h.estimate[b] - mass);
  }
  sum += std::abs(h.outside - (1.0 - inside));
  return 0.5 * sum;
}

inline cis::Proposal make_proposal(const ExperimentConfig& config) {
  if (config.proposal == "student") return cis::StudentTProposal{config.nu};
  return cis::BrownianProposal{};
}

/// The weight-update rate for the configured proposal and estimator. The target must outlive it.
inline cis::RhoFn make_rho(const ExperimentConfig& config, const MixtureProblem& problem) {
  const auto& t = problem.target();
  if (config.proposal == "student") {
    if (config.rho != "exact") {
      throw ConfigError{"the Student-t proposal supports rho=exact only"};
    }
    return cis::kernel_scale_rho(t, cis::StudentTProposal{config.nu});
  }
  if (config.rho == "subsample") return cis::subsample_scale_rho(t);
  if (config.rho == "cv") return cis::cv_scale_rho(t, problem.cv_cache());
  return cis::exact_scale_rho(t);
}

/// Initial particle law: the N(0, 4) prior, the quadrature posterior, or uniform on [init_lo, init_hi].
inline std::function<Vector(RngStream&)> make_initializer(const ExperimentConfig& config,
                                                          const MixtureProblem& problem) {
  if (config.init == "posterior") {
    const auto* q = &problem.posterior();
    return [q](RngStream& rng) { return Vector::Constant(1, q->sample(rng)); };
  }
  if (config.init == "uniform") {
    const double lo = config.init_lo;
    const double hi = config.init_hi;
    return [lo, hi](RngStream& rng) { return Vector::Constant(1, rng.uniform(lo, hi)); };
  }
  const double sd = std::sqrt(problem.target().params().prior_variance);
  return [sd](RngStream& rng) { return Vector::Constant(1, sd * rng.normal()); };
}

struct SmcRun {
  cis::SmcResult result;
  PosteriorHistogram histogram;
  double tv = 0.0;
  double wall_time = 0.0;
};

/// SMC over [0, steps * h] with a constant event rate; the histogram uses t >= T / 4.
inline SmcRun run_smc_experiment(const ExperimentConfig& config, const MixtureProblem& problem) {
  const auto start = std::chrono::steady_clock::now();
  RngStream rng = run_stream(config);
  const cis::SmcConfig smc{config.particles, config.h, config.steps, config.ess_threshold};
  SmcRun run;
  run.result = cis::run_smc(smc, make_initializer(config, problem), make_proposal(config), make_rho(config, problem),
                            cis::constant_event_rate(config.rate), rng);
  const double horizon = config.h * static_cast<double>(config.steps);
  run.histogram = weighted_histogram(run.result.snapshots, 0.25 * horizon, posterior_bin_edges(problem.posterior()));
  run.tv = total_variation(run.histogram, problem.posterior());
  run.wall_time = detail::seconds_since(start);
  return run;
}

inline void write_histogram_csv(std::ostream& os, const PosteriorHistogram& h,
                                const targets::PosteriorQuadrature& posterior) {
  os << "bin_lo,bin_hi,weighted,posterior\n" << std::setprecision(10);
  for (std::size_t b = 0; b + 1 < h.edges.size(); ++b) {
    os << h.edges[b] << ',' << h.edges[b + 1] << ',' << h.estimate[b] << ','
       << posterior.cdf(h.edges[b + 1]) - posterior.cdf(h.edges[b]) << '\n';
  }
}

/// The `smc` command: particles.jsonl, smc_summary.csv, posterior_hist.csv and the manifest.
inline SmcRun run_smc_command(const ExperimentConfig& config) {
  config.validate();
  const std::filesystem::path dir{config.out};
  const auto problem = make_problem(config, config.n, dir);
  auto run = run_smc_experiment(config, *problem);
  std::ostringstream particles;
  cis::write_snapshots_jsonl(particles, run.result.snapshots);
  std::ostringstream summary;
  summary << "n,particles,h,steps,rate,rho,resamplings,events,data_accesses,negative_weight_fraction,tv\n"
          << std::setprecision(10) << problem->n() << ',' << config.particles << ',' << config.h << ','
          << config.steps << ',' << config.rate << ',' << config.rho << ',' << run.result.resamplings << ','
          << run.result.counters.events << ',' << run.result.counters.data_accesses << ','
          << run.result.negative_weight_fraction() << ',' << run.tv << '\n';
  std::ostringstream hist;
  write_histogram_csv(hist, run.histogram, problem->posterior());
  write_file_atomic(dir / "particles.jsonl", particles.str());
  write_file_atomic(dir / "smc_summary.csv", summary.str());
  write_file_atomic(dir / "posterior_hist.csv", hist.str());
  write_manifest(dir, "smc", config, {"particles.jsonl", "smc_summary.csv", "posterior_hist.csv"});
  return run;
}

/// The `cis` command: one particle over [0, T]; writes its (t, x, w) trajectory and the final weighted draw.
inline cis::CisRun run_cis_command(const ExperimentConfig& config) {
  config.validate();
  const std::filesystem::path dir{config.out};
  const auto problem = make_problem(config, config.n, dir);
  RngStream rng = run_stream(config);
  const Vector x0 = make_initializer(config, *problem)(rng);
  auto run = cis::run_cis(x0, make_proposal(config), make_rho(config, *problem), cis::constant_event_rate(config.rate),
                          config.T, rng);
  std::ostringstream particles;
  std::vector<cis::SmcSnapshot> rows;
  for (const auto& d : run.trajectory) rows.push_back({d.t, {d.x}, {d.w}, 1.0, false});
  rows.push_back({run.final_draw.t, {run.final_draw.x}, {run.final_draw.w}, 1.0, false});
  cis::write_snapshots_jsonl(particles, rows);
  std::ostringstream summary;
  summary << "n,T,rate,rho,events,data_accesses,sign_changes,final_w\n"
          << std::setprecision(10) << problem->n() << ',' << config.T << ',' << config.rate << ',' << config.rho << ','
          << run.counters.events << ',' << run.counters.data_accesses << ',' << run.counters.sign_changes << ','
          << run.final_draw.w << '\n';
  write_file_atomic(dir / "particles.jsonl", particles.str());
  write_file_atomic(dir / "cis_summary.csv", summary.str());
  write_manifest(dir, "cis", config, {"particles.jsonl", "cis_summary.csv"});
  return run;
}

inline cis::VarianceStudyConfig variance_study_config(const ExperimentConfig& config) {
  cis::VarianceStudyConfig v;
  v.ns.clear();
  for (double n : config.ns) v.ns.push_back(static_cast<std::size_t>(n));
  v.xhat_offsets = config.xhat_offsets;
  v.replicates = config.replicates;
  v.x_true = config.x_true;
  v.p = config.p;
  v.data = [seed = config.seed, x_true = config.x_true, p = config.p](std::size_t n) {
    return generate_dataset(seed, n, x_true, p);
  };
  return v;
}

/// The `variance-study` command: variance.csv and the manifest.
inline std::vector<cis::VarianceRow> run_variance_command(const ExperimentConfig& config) {
  config.validate();
  const std::filesystem::path dir{config.out};
  RngStream rng{config.seed, config.stream};
  const auto rows = cis::variance_study(variance_study_config(config), rng);
  std::ostringstream csv;
  cis::write_variance_csv(csv, rows);
  write_file_atomic(dir / "variance.csv", csv.str());
  write_manifest(dir, "variance-study", config, {"variance.csv"});
  return rows;
}

}  // namespace ctmc::harness

#endif  // CTMC_HARNESS_EXPERIMENT_HPP

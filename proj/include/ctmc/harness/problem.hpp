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

#ifndef CTMC_HARNESS_PROBLEM_HPP
#define CTMC_HARNESS_PROBLEM_HPP

#include <ctmc/errors.hpp>
#include <ctmc/harness/config.hpp>
#include <ctmc/rng.hpp>
#include <ctmc/targets/bounds.hpp>
#include <ctmc/targets/control_variate.hpp>
#include <ctmc/targets/dataset.hpp>
#include <ctmc/targets/mixture.hpp>
#include <ctmc/targets/posterior.hpp>

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ctmc::harness {

/// Observations of size n for a seed: the same seed always yields the same dataset.
inline std::vector<double> generate_dataset(std::uint64_t seed, std::size_t n, double x_true, double p) {
  RngStream rng = RngStream{seed}.substream(n);
  return targets::simulate_mixture_data(n, rng, x_true, p);
}

/// A mixture posterior with its bound table and quadrature reference.
/**
 * Pinned in memory because the quadrature refers to the target. The bound table is read from a
 * sidecar file in `cache_dir` when one exists for the same data and model, and written there
 * otherwise.
 */
class MixtureProblem {
 public:
  MixtureProblem(std::vector<double> data, targets::MixtureParams params, const std::filesystem::path& cache_dir = {})
      : target_{std::move(data), params}, interval_{targets::search_interval(target_.data())} {
    key_ = targets::dataset_hash(target_.data()) + "-" + fingerprint(params);
    const auto sidecar = cache_dir.empty() ? std::filesystem::path{} : cache_dir / ("bounds-" + key_ + ".json");
    if (!sidecar.empty()) table_ = targets::load_bound_table(sidecar, key_);
    if (!table_) {
      table_ = targets::factor_bound_table(target_, interval_);
      if (!sidecar.empty()) {
        std::filesystem::create_directories(cache_dir);
        targets::save_bound_table(sidecar, *table_, key_);
      }
    }
    posterior_.emplace(targets::posterior_quadrature(target_, interval_.lo, interval_.hi));
  }

  MixtureProblem(const MixtureProblem&) = delete;
  MixtureProblem& operator=(const MixtureProblem&) = delete;

  [[nodiscard]] const targets::MixtureTarget& target() const { return target_; }
  [[nodiscard]] const targets::SearchInterval& interval() const { return interval_; }
  [[nodiscard]] const targets::FactorBoundTable& table() const { return *table_; }
  [[nodiscard]] const targets::PosteriorQuadrature& posterior() const { return *posterior_; }
  [[nodiscard]] std::size_t n() const { return target_.factor_count(); }
  [[nodiscard]] const std::string& key() const { return key_; }

  /// Control-variate cache at x_hat, the posterior mode by default.
  [[nodiscard]] std::shared_ptr<const targets::ControlVariateCache> cv_cache(std::optional<double> x_hat = {}) const {
    return std::make_shared<const targets::ControlVariateCache>(
        targets::make_control_variate_cache(target_, Vector::Constant(1, x_hat.value_or(posterior_->mode()))));
  }

 private:
  static std::string fingerprint(const targets::MixtureParams& p) {
    return targets::dataset_hash({p.p, p.broad_sd, p.narrow_sd, p.prior_variance});
  }

  targets::MixtureTarget target_;
  targets::SearchInterval interval_;
  std::optional<targets::FactorBoundTable> table_;
  std::optional<targets::PosteriorQuadrature> posterior_;
  std::string key_;
};

/// Builds the mixture problem a config describes: the dataset file if given, else generated data.
inline std::unique_ptr<MixtureProblem> make_problem(const ExperimentConfig& config, std::size_t n,
                                                    const std::filesystem::path& cache_dir) {
  targets::MixtureParams params;
  params.p = config.p;
  std::vector<double> data = config.dataset.empty() ? generate_dataset(config.seed, n, config.x_true, config.p)
                                                    : targets::load_dataset_csv(config.dataset);
  return std::make_unique<MixtureProblem>(std::move(data), params, cache_dir);
}

}  // namespace ctmc::harness

#endif  // CTMC_HARNESS_PROBLEM_HPP

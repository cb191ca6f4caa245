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

// Command-line front end: sample, cis, smc, variance-study, table1 and export.

#include <ctmc/errors.hpp>
#include <ctmc/harness/config.hpp>
#include <ctmc/harness/experiment.hpp>
#include <ctmc/harness/figures.hpp>
#include <ctmc/harness/table1.hpp>

#if __has_include(<CLI11.hpp>)
#include <CLI11.hpp>
#else
#include <CLI/CLI.hpp>
#endif

#include <iomanip>
#include <iostream>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace {

using ctmc::harness::ExperimentConfig;

/// Flags shared by every subcommand, each mapped onto a config key.
struct Flags {
  std::string config_file;
  std::map<std::string, std::string> values;
  std::vector<std::pair<std::string, CLI::Option*>> options;

  void add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    options.emplace_back(key, app->add_option(flag, values[key], help));
  }

  [[nodiscard]] std::vector<std::pair<std::string, std::string>> overrides() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& [key, option] : options) {
      if (option->count() > 0) out.emplace_back(key, values.at(key));
    }
    return out;
  }
};

void add_common(CLI::App* app, Flags& flags) {
  app->add_option("--config", flags.config_file, "key=value file; command-line flags take precedence");
  flags.add(app, "--seed", "seed", "master seed");
  flags.add(app, "--stream", "stream", "sub-stream of the seed used for the run");
  flags.add(app, "--out", "out", "output directory (default $CTMC_OUTPUT_DIR or ./ctmc_out)");
  flags.add(app, "--target", "target", "mixture | gaussian");
  flags.add(app, "--n", "n", "number of observations for generated data");
  flags.add(app, "--p", "p", "weight of the broad mixture component");
  flags.add(app, "--x-true", "x_true", "location used to generate data");
  flags.add(app, "--dataset", "dataset", "CSV file with one observation per line");
}

void add_sampler(CLI::App* app, Flags& flags) {
  flags.add(app, "--algo", "algo", "reflect | bps | zigzag");
  flags.add(app, "--estimator", "estimator", "exact | simple | nonuniform | cv | hybrid");
  flags.add(app, "--bound", "bound", "simple | sum | max | cv | hybrid | exact");
  flags.add(app, "--T", "T", "time horizon");
  flags.add(app, "--burn-in", "burn_in", "burn-in as a fraction of T");
  flags.add(app, "--refresh-rate", "refresh_rate", "refresh rate for BPS");
  flags.add(app, "--epsilon", "epsilon", "constant added to switching rates");
  flags.add(app, "--hybrid-k", "hybrid_k", "control-variate radius in units of 1/sqrt(n)");
  flags.add(app, "--x0", "x0", "initial position or 'mode'");
  flags.add(app, "--dim", "dim", "dimension of the gaussian target");
}

void add_particles(CLI::App* app, Flags& flags) {
  flags.add(app, "--particles", "particles", "number of particles N");
  flags.add(app, "--interval", "h", "time h between resampling checks");
  flags.add(app, "--steps", "steps", "number of intervals K");
  flags.add(app, "--ess-threshold", "ess_threshold", "resample when the weight ESS falls below this");
  flags.add(app, "--rate", "rate", "constant CIS event rate");
  flags.add(app, "--rho", "rho", "exact | subsample | cv");
  flags.add(app, "--proposal", "proposal", "brownian | student");
  flags.add(app, "--nu", "nu", "degrees of freedom of the Student-t proposal");
  flags.add(app, "--init", "init", "prior | posterior | uniform");
  flags.add(app, "--init-lo", "init_lo", "lower end for uniform initialization");
  flags.add(app, "--init-hi", "init_hi", "upper end for uniform initialization");
  flags.add(app, "--T", "T", "time horizon of a single CIS run");
}

int run(int argc, char** argv) {
  CLI::App app{"Continuous-time MCMC and continuous-time importance sampling experiments"};
  app.require_subcommand(1);
  std::map<std::string, Flags> flags;

  auto* sample = app.add_subcommand("sample", "continuous-time MCMC run: skeleton, summary row, manifest");
  add_common(sample, flags["sample"]);
  add_sampler(sample, flags["sample"]);

  auto* cis = app.add_subcommand("cis", "single continuous-time importance sampling particle");
  add_common(cis, flags["cis"]);
  add_particles(cis, flags["cis"]);

  auto* smc = app.add_subcommand("smc", "continuous-time SMC with resampling");
  add_common(smc, flags["smc"]);
  add_particles(smc, flags["smc"]);

  auto* variance = app.add_subcommand("variance-study", "variance of W_h and data accesses across n");
  add_common(variance, flags["variance-study"]);
  flags["variance-study"].add(variance, "--ns", "ns", "comma-separated data sizes");
  flags["variance-study"].add(variance, "--xhat-offsets", "xhat_offsets", "anchor offsets in posterior sds");
  flags["variance-study"].add(variance, "--replicates", "replicates", "replicate runs per configuration");

  auto* table1 = app.add_subcommand("table1", "efficiency sweep over n and the four methods");
  add_common(table1, flags["table1"]);
  flags["table1"].add(table1, "--ns", "ns", "comma-separated data sizes");
  flags["table1"].add(table1, "--table1-T", "table1_T", "comma-separated horizons, one per n");
  flags["table1"].add(table1, "--algo", "algo", "reflect | bps | zigzag");
  flags["table1"].add(table1, "--burn-in", "burn_in", "burn-in as a fraction of T");

  auto* exporter = app.add_subcommand("export", "figure data as CSV");
  add_common(exporter, flags["export"]);
  add_particles(exporter, flags["export"]);
  flags["export"].add(exporter, "--kind", "kind", "rates_curves | variance_curves | posterior_hist");
  flags["export"].add(exporter, "--grid", "grid", "number of grid points");

  CLI11_PARSE(app, argc, argv);

  for (auto* sub : app.get_subcommands()) {
    const auto& f = flags.at(sub->get_name());
    const ExperimentConfig config = ctmc::harness::resolve_config(f.config_file, f.overrides());
    const std::string name = sub->get_name();
    std::cout << std::setprecision(6);
    if (name == "sample") {
      const auto s = ctmc::harness::run_experiment(config);
      std::cout << "t_per_ess=" << s.t_per_ess << " iters_per_unit_time=" << s.iters_per_unit_time
                << " iters_per_ess=" << s.iters_per_ess << " factor_evals=" << s.factor_evals
                << " wall_time=" << s.wall_time << "s\n";
    } else if (name == "cis") {
      const auto r = ctmc::harness::run_cis_command(config);
      std::cout << "events=" << r.counters.events << " data_accesses=" << r.counters.data_accesses
                << " final_w=" << r.final_draw.w << '\n';
    } else if (name == "smc") {
      const auto r = ctmc::harness::run_smc_command(config);
      std::cout << "resamplings=" << r.result.resamplings << " negative_weight_fraction="
                << r.result.negative_weight_fraction() << " tv=" << r.tv << " wall_time=" << r.wall_time << "s\n";
    } else if (name == "variance-study") {
      ctmc::cis::write_variance_csv(std::cout, ctmc::harness::run_variance_command(config));
    } else if (name == "table1") {
      ctmc::harness::run_table1_command(config, [](const ctmc::harness::Table1Cell& c) {
        std::cerr << "n=" << c.n << ' ' << c.method.name << ": "
                  << (c.stats ? "t_per_ess=" + std::to_string(c.stats->t_per_ess) : "error: " + c.error) << '\n';
      });
    } else {
      std::cout << "wrote " << ctmc::harness::export_figure_data(config) << '\n';
    }
    std::cout << "output: " << config.out << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ctmc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

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

#ifndef CTMC_HARNESS_TABLE1_HPP
#define CTMC_HARNESS_TABLE1_HPP

#include <ctmc/harness/artifacts.hpp>
#include <ctmc/harness/config.hpp>
#include <ctmc/harness/experiment.hpp>
#include <ctmc/harness/problem.hpp>
#include <ctmc/harness/stats.hpp>

#include <exception>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace ctmc::harness {

/// One column of the comparison: an estimator paired with the bound it is thinned against.
struct Table1Method {
  std::string name;
  std::string estimator;
  std::string bound;
};

/// Canonical rates with the sum-of-factor-bounds and with the gradient-maximum bound,
/// non-uniform sub-sampling with the sum bound, and control variates with their V-shaped bound.
inline const std::vector<Table1Method>& table1_methods() {
  static const std::vector<Table1Method> methods{{"canonical_sum", "exact", "sum"},
                                                 {"canonical_max", "exact", "max"},
                                                 {"subsampling", "nonuniform", "sum"},
                                                 {"cv", "cv", "cv"}};
  return methods;
}

struct Table1Cell {
  std::size_t n = 0;
  Table1Method method;
  std::string algo;
  double T = 0.0;
  std::optional<SummaryStats> stats;
  std::string error;
};

/// Runs every method for every n in config.ns, with horizon config.table1_T[i] for ns[i].
/**
 * A failing cell records its error and the sweep moves on. `progress` sees each finished cell.
 */
inline std::vector<Table1Cell> table1_sweep(const ExperimentConfig& base, const std::filesystem::path& cache_dir,
                                            const std::function<void(const Table1Cell&)>& progress = {}) {
  std::vector<Table1Cell> cells;
  for (std::size_t i = 0; i < base.ns.size(); ++i) {
    const auto n = static_cast<std::size_t>(base.ns[i]);
    std::unique_ptr<MixtureProblem> problem;
    std::string problem_error;
    try {
      problem = make_problem(base, n, cache_dir);
    } catch (const std::exception& e) {
      problem_error = e.what();
    }
    for (const auto& method : table1_methods()) {
      Table1Cell cell{n, method, base.algo, base.table1_T[i], std::nullopt, problem_error};
      if (problem) {
        try {
          ExperimentConfig config = base;
          config.n = n;
          config.estimator = method.estimator;
          config.bound = method.bound;
          config.T = cell.T;
          config.validate();
          cell.stats = run_sample(config, *problem, cell.T).stats;
        } catch (const std::exception& e) {
          cell.error = e.what();
        }
      }
      if (progress) progress(cell);
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

inline void write_table1_csv(std::ostream& os, const std::vector<Table1Cell>& cells) {
  os << "n,method,algo,estimator,bound,T,t_per_ess,iters_per_unit_time,iters_per_ess,factor_evals,"
        "factor_evals_per_ess,status\n";
  os << std::setprecision(10);
  for (const auto& c : cells) {
    os << c.n << ',' << c.method.name << ',' << c.algo << ',' << c.method.estimator << ',' << c.method.bound << ','
       << c.T << ',';
    if (c.stats) {
      os << c.stats->t_per_ess << ',' << c.stats->iters_per_unit_time << ',' << c.stats->iters_per_ess << ','
         << std::setprecision(15) << c.stats->factor_evals << std::setprecision(10) << ','
         << c.stats->factor_evals_per_ess << ",ok\n";
    } else {
      std::string reason = c.error;
      for (char& ch : reason) {
        if (ch == ',' || ch == '\n') ch = ';';
      }
      os << ",,,,,error: " << reason << '\n';
    }
  }
}

/// The `table1` command: table1.csv and the manifest.
inline std::vector<Table1Cell> run_table1_command(const ExperimentConfig& config,
                                                  const std::function<void(const Table1Cell&)>& progress = {}) {
  config.validate();
  const std::filesystem::path dir{config.out};
  auto cells = table1_sweep(config, dir, progress);
  std::ostringstream csv;
  write_table1_csv(csv, cells);
  write_file_atomic(dir / "table1.csv", csv.str());
  write_manifest(dir, "table1", config, {"table1.csv"});
  return cells;
}

}  // namespace ctmc::harness

#endif  // CTMC_HARNESS_TABLE1_HPP

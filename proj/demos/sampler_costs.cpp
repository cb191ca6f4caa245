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

// Compares canonical, sub-sampled and control-variate switching on one dataset.

#include <ctmc/harness/config.hpp>
#include <ctmc/harness/experiment.hpp>
#include <ctmc/harness/figures.hpp>
#include <ctmc/harness/problem.hpp>
#include <ctmc/harness/table1.hpp>

#include <cstdio>
#include <cstdlib>
#include <string>

int main(int argc, char** argv) {
  const std::string n = argc > 1 ? argv[1] : "1500";
  const std::string T = argc > 2 ? argv[2] : "500";
  auto config = ctmc::harness::resolve_config("", {{"n", n}, {"T", T}});
  const ctmc::harness::MixtureProblem problem{
      ctmc::harness::generate_dataset(config.seed, config.n, config.x_true, config.p), {}};
  const double mode = problem.posterior().mode();
  const double sd = problem.posterior().sd();

  std::printf("switching rates for v = +1 around the mode %.3f (sd %.3f)\n", mode, sd);
  std::printf("%8s %12s %12s %12s\n", "x", "canonical", "subsample", "cv");
  for (const auto& p : ctmc::harness::rate_curves(problem, {mode - 3 * sd, mode - sd, mode, mode + sd, mode + 3 * sd})) {
    std::printf("%8.3f %12.2f %12.2f %12.2f\n", p.x, p.canonical[0], p.simple[0], p.cv[0]);
  }

  std::printf("\n%-14s %10s %14s %12s\n", "method", "t/ESS", "iters/unit t", "iters/ESS");
  for (const auto& method : ctmc::harness::table1_methods()) {
    config.estimator = method.estimator;
    config.bound = method.bound;
    const auto s = ctmc::harness::run_sample(config, problem, config.T).stats;
    std::printf("%-14s %10.3f %14.1f %12.1f\n", method.name.c_str(), s.t_per_ess, s.iters_per_unit_time,
                s.iters_per_ess);
  }
  return EXIT_SUCCESS;
}

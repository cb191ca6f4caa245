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

// Continuous-time SMC on the n = 150 mixture posterior: weighted histogram against quadrature.

#include <ctmc/harness/config.hpp>
#include <ctmc/harness/experiment.hpp>
#include <ctmc/harness/problem.hpp>

#include <cstdio>
#include <string>
#include <utility>
#include <vector>

int main(int argc, char** argv) {
  std::vector<std::pair<std::string, std::string>> overrides;
  if (argc > 1) overrides.emplace_back("seed", argv[1]);
  const auto config = ctmc::harness::resolve_config("", overrides);
  const ctmc::harness::MixtureProblem problem{
      ctmc::harness::generate_dataset(config.seed, config.n, config.x_true, config.p), {}};
  const auto& posterior = problem.posterior();
  std::printf("posterior: mode %.3f, mean %.3f, sd %.3f\n", posterior.mode(), posterior.mean(), posterior.sd());

  const auto run = ctmc::harness::run_smc_experiment(config, problem);
  const auto& h = run.histogram;
  std::printf("%9s %9s %9s %9s\n", "lo", "hi", "smc", "exact");
  for (std::size_t b = 0; b + 1 < h.edges.size(); ++b) {
    const double exact = posterior.cdf(h.edges[b + 1]) - posterior.cdf(h.edges[b]);
    std::printf("%9.3f %9.3f %9.4f %9.4f  %s\n", h.edges[b], h.edges[b + 1], h.estimate[b], exact,
                std::string(static_cast<std::size_t>(200.0 * h.estimate[b]), '#').c_str());
  }
  std::printf("outside: %.4f\n", h.outside);
  std::printf("total variation %.4f, negative weights %.4f, resamplings %zu, %.2f s\n", run.tv,
              run.result.negative_weight_fraction(), run.result.resamplings, run.wall_time);
  return 0;
}

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

#ifndef CTMC_TARGETS_SEARCH_HPP
#define CTMC_TARGETS_SEARCH_HPP

#include <ctmc/errors.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace ctmc::targets {

inline constexpr double kInverseGolden = 0.6180339887498949;

/// Golden-section maximization of a unimodal f on [lo, hi]; returns the argmax.
template <class F>
double golden_section_argmax(F&& f, double lo, double hi, double tolerance = 1e-8) {
  double a = lo;
  double b = hi;
  double c = b - kInverseGolden * (b - a);
  double d = a + kInverseGolden * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tolerance * std::max(1.0, std::abs(a) + std::abs(b))) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInverseGolden * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInverseGolden * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

struct MaximumResult {
  double argmax = 0.0;
  double value = 0.0;
};

/// Maximum of f over [lo, hi] by a grid scan with spacing `step`, refined by golden section.
/**
 * The refinement runs on the two grid cells around the best grid point; the larger of the grid
 * and refined values is returned, so the result never undershoots the grid maximum.
 */
template <class F>
MaximumResult grid_golden_maximum(F&& f, double lo, double hi, double step, double tolerance = 1e-8) {
  if (!(hi > lo) || !(step > 0.0)) {
    throw ContractViolation{"grid_golden_maximum: need lo < hi and step > 0"};
  }
  const auto cells = static_cast<std::size_t>(std::ceil((hi - lo) / step));
  const double h = (hi - lo) / static_cast<double>(cells);
  MaximumResult best{lo, f(lo)};
  std::size_t best_k = 0;
  for (std::size_t k = 1; k <= cells; ++k) {
    const double x = k == cells ? hi : lo + static_cast<double>(k) * h;
    const double value = f(x);
    if (value > best.value) {
      best = {x, value};
      best_k = k;
    }
  }
  const double a = best_k == 0 ? lo : lo + static_cast<double>(best_k - 1) * h;
  const double b = best_k == cells ? hi : lo + static_cast<double>(best_k + 1) * h;
  const double x = golden_section_argmax(f, a, b, tolerance);
  const double value = f(x);
  if (value > best.value) {
    best = {x, value};
  }
  return best;
}

}  // namespace ctmc::targets

#endif  // CTMC_TARGETS_SEARCH_HPP

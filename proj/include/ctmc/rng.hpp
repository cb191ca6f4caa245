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

#ifndef CTMC_RNG_HPP
#define CTMC_RNG_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>

namespace ctmc {

/// Seeded pseudo-random stream.
/**
 * A stream is identified by a (seed, stream id) pair. The two numbers are mixed into the
 * seed sequence of a 64-bit Mersenne twister, so identical pairs reproduce identical draws
 * and distinct stream ids give statistically independent sequences. Streams are cheap to
 * construct; parallel consumers should each own one.
 */
class RngStream {
 public:
  using result_type = std::mt19937_64::result_type;

  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0) : seed_{seed}, stream_{stream} {
    const std::uint64_t a = mix(seed);
    const std::uint64_t b = mix(stream ^ 0xda942042e4dd58b5ULL);
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    engine_.seed(seq);
  }

  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] std::uint64_t stream() const noexcept { return stream_; }

  /// Child stream derived from this stream's identity; does not consume draws.
  [[nodiscard]] RngStream substream(std::uint64_t index) const {
    return RngStream{seed_, mix(stream_ + 0x9e3779b97f4a7c15ULL * (index + 1))};
  }

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform on the open interval (0, 1).
  double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Exponential with unit rate.
  double exponential() { return -std::log(uniform()); }

  double normal() { return normal_(engine_); }

  /// Uniform index in [0, n).
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
  }

  /// Index drawn with probability proportional to the increments of `cumulative`.
  /**
   * `cumulative` is a non-decreasing table of partial sums whose last entry is the total mass.
   */
  std::size_t index_from_cumulative(std::span<const double> cumulative) {
    const double target = uniform() * cumulative.back();
    std::size_t lo = 0;
    std::size_t hi = cumulative.size() - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (cumulative[mid] > target) {
        hi = mid;
      } else {
        lo = mid + 1;
      }
    }
    return lo;
  }

  /// Chi-squared draw with `dof` degrees of freedom.
  double chi_squared(double dof) { return std::chi_squared_distribution<double>{dof}(engine_); }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace ctmc

#endif  // CTMC_RNG_HPP

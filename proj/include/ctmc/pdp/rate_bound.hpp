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

#ifndef CTMC_PDP_RATE_BOUND_HPP
#define CTMC_PDP_RATE_BOUND_HPP

#include <ctmc/errors.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace ctmc::pdp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// One linear piece of an envelope: `a + b * (u - start)` on `[start, end)`.
/// Relative slack allowed when comparing a rate to its envelope, for rounding in exact envelopes.
inline constexpr double kBoundRelativeSlack = 1e-10;

/// True when `rate` exceeds `envelope` by more than rounding.
inline bool exceeds_bound(double rate, double envelope) { return rate > envelope * (1.0 + kBoundRelativeSlack); }

struct BoundSegment {
  double start = 0.0;
  double end = kInfinity;
  double a = 0.0;
  double b = 0.0;

  [[nodiscard]] double value(double u) const { return a + b * (u - start); }

  /// Integral of the segment's rate over [u0, u1], both inside the segment.
  [[nodiscard]] double mass(double u0, double u1) const {
    const double r0 = value(u0);
    const double len = u1 - u0;
    return r0 * len + 0.5 * b * len * len;
  }

  bool operator==(const BoundSegment&) const = default;
};

/// Piecewise-linear upper envelope of an event rate, as a function of time since the last event.
/**
 * Segments are contiguous, start at 0 and are non-negative everywhere. Constant and linear
 * envelopes are the one-segment special cases. The final segment may extend to infinity
 * provided its slope is non-negative.
 */
class RateBound {
 public:
  RateBound() : RateBound{constant(0.0)} {}

  explicit RateBound(std::vector<BoundSegment> segments) : segments_{std::move(segments)} { validate(); }

  static RateBound constant(double rate, double horizon = kInfinity) {
    return RateBound{{BoundSegment{0.0, horizon, rate, 0.0}}};
  }

  static RateBound linear(double intercept, double slope, double horizon = kInfinity) {
    return RateBound{{BoundSegment{0.0, horizon, intercept, slope}}};
  }

  /// Exact envelope of `max(0, intercept + slope * u)`.
  static RateBound positive_part_of_affine(double intercept, double slope, double horizon = kInfinity) {
    if (slope == 0.0) {
      return constant(std::max(0.0, intercept), horizon);
    }
    const double root = -intercept / slope;
    if (slope > 0.0) {
      if (root <= 0.0) {
        return linear(intercept, slope, horizon);
      }
      if (root >= horizon) {
        return constant(0.0, horizon);
      }
      return RateBound{{BoundSegment{0.0, root, 0.0, 0.0}, BoundSegment{root, horizon, 0.0, slope}}};
    }
    if (root <= 0.0) {
      return constant(0.0, horizon);
    }
    if (root >= horizon) {
      return linear(intercept, slope, horizon);
    }
    return RateBound{{BoundSegment{0.0, root, intercept, slope}, BoundSegment{root, horizon, 0.0, 0.0}}};
  }

  [[nodiscard]] const std::vector<BoundSegment>& segments() const noexcept { return segments_; }
  [[nodiscard]] double horizon() const noexcept { return segments_.back().end; }

  [[nodiscard]] double operator()(double u) const { return segment_at(u).value(u); }

  [[nodiscard]] const BoundSegment& segment_at(double u) const {
    auto it = std::upper_bound(segments_.begin(), segments_.end(), u,
                               [](double t, const BoundSegment& s) { return t < s.end; });
    if (it == segments_.end()) {
      return segments_.back();
    }
    return *it;
  }

  /// Integral of the envelope over [u0, u1].
  [[nodiscard]] double integral(double u0, double u1) const {
    double total = 0.0;
    for (const auto& seg : segments_) {
      const double lo = std::max(u0, seg.start);
      const double hi = std::min(u1, seg.end);
      if (hi > lo) {
        total += seg.mass(lo, hi);
      }
    }
    return total;
  }

  /// Envelope raised by a constant offset.
  [[nodiscard]] RateBound plus(double offset) const {
    auto segs = segments_;
    for (auto& s : segs) {
      s.a += offset;
    }
    return RateBound{std::move(segs)};
  }

  bool operator==(const RateBound&) const = default;

 private:
  void validate() const {
    if (segments_.empty()) {
      throw ContractViolation{"RateBound: no segments"};
    }
    if (segments_.front().start != 0.0) {
      throw ContractViolation{"RateBound: first segment must start at 0"};
    }
    for (std::size_t k = 0; k < segments_.size(); ++k) {
      const auto& s = segments_[k];
      if (!(s.end > s.start)) {
        throw ContractViolation{"RateBound: empty or reversed segment"};
      }
      if (k + 1 < segments_.size() && segments_[k + 1].start != s.end) {
        throw ContractViolation{"RateBound: segments are not contiguous"};
      }
      if (!std::isfinite(s.a) || !std::isfinite(s.b)) {
        throw ContractViolation{"RateBound: non-finite coefficients"};
      }
      const double tol = 1e-12 * std::max(1.0, std::abs(s.a));
      if (s.a < -tol) {
        throw ContractViolation{"RateBound: negative value at segment start"};
      }
      if (std::isinf(s.end)) {
        if (s.b < 0.0) {
          throw ContractViolation{"RateBound: unbounded segment with negative slope"};
        }
      } else if (s.value(s.end) < -tol) {
        throw ContractViolation{"RateBound: negative value at segment end"};
      }
    }
  }

  std::vector<BoundSegment> segments_;
};

/// Pointwise maximum of two envelopes, on the shorter of the two horizons.
inline RateBound pointwise_max(const RateBound& lhs, const RateBound& rhs) {
  const double horizon = std::min(lhs.horizon(), rhs.horizon());
  std::vector<double> cuts{0.0};
  for (const auto* bound : {&lhs, &rhs}) {
    for (const auto& s : bound->segments()) {
      if (s.end < horizon) {
        cuts.push_back(s.end);
      }
    }
  }
  cuts.push_back(horizon);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<BoundSegment> out;
  auto emit = [&out](double start, double end, double a, double b) {
    if (!out.empty() && out.back().b == b && out.back().value(start) == a) {
      out.back().end = end;
      return;
    }
    out.push_back({start, end, a, b});
  };
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double p = cuts[k];
    const double q = cuts[k + 1];
    const auto& sl = lhs.segment_at(p);
    const auto& sr = rhs.segment_at(p);
    const double al = sl.value(p);
    const double ar = sr.value(p);
    const double diff0 = al - ar;
    const double dslope = sl.b - sr.b;
    // Crossing strictly inside (p, q)?
    if (dslope != 0.0) {
      const double cross = p - diff0 / dslope;
      if (cross > p && cross < q) {
        const bool left_first = diff0 > 0.0;
        const auto& first = left_first ? sl : sr;
        const auto& second = left_first ? sr : sl;
        emit(p, cross, first.value(p), first.b);
        emit(cross, q, second.value(cross), second.b);
        continue;
      }
    }
    const bool take_left = diff0 > 0.0 || (diff0 == 0.0 && dslope >= 0.0);
    const auto& chosen = take_left ? sl : sr;
    emit(p, q, chosen.value(p), chosen.b);
  }
  return RateBound{std::move(out)};
}

}  // namespace ctmc::pdp

#endif  // CTMC_PDP_RATE_BOUND_HPP

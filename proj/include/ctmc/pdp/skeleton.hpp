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

#ifndef CTMC_PDP_SKELETON_HPP
#define CTMC_PDP_SKELETON_HPP

#include <ctmc/errors.hpp>
#include <ctmc/linalg.hpp>

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace ctmc::pdp {

enum class EventKind { initial, reflection, flip, refresh, terminal };

/// Label used in serialized skeletons, e.g. "reflection" or "flip(2)".
inline std::string event_label(EventKind kind, int index = -1) {
  switch (kind) {
    case EventKind::initial:
      return "initial";
    case EventKind::reflection:
      return "reflection";
    case EventKind::flip:
      return "flip(" + std::to_string(index) + ")";
    case EventKind::refresh:
      return "refresh";
    case EventKind::terminal:
      return "terminal";
  }
  return "unknown";
}

inline std::pair<EventKind, int> parse_event_label(const std::string& label) {
  if (label == "initial") return {EventKind::initial, -1};
  if (label == "reflection") return {EventKind::reflection, -1};
  if (label == "refresh") return {EventKind::refresh, -1};
  if (label == "terminal") return {EventKind::terminal, -1};
  if (label.rfind("flip(", 0) == 0 && label.back() == ')') {
    return {EventKind::flip, std::stoi(label.substr(5, label.size() - 6))};
  }
  throw ContractViolation{"unknown event label: " + label};
}

struct SkeletonPoint {
  double t = 0.0;
  Vector x;
  Vector v;
  EventKind kind = EventKind::initial;
  int index = -1;
};

/// Event times and post-event states of a constant-velocity PDP path on [0, horizon].
/**
 * Stored column-wise so long runs stay compact. The full path is recovered by linear flow
 * from the last event before any query time.
 */
class Skeleton {
 public:
  Skeleton() = default;
  Skeleton(std::size_t dimension, double horizon) : dimension_{dimension}, horizon_{horizon} {}

  void append(double t, const Vector& x, const Vector& v, EventKind kind, int index = -1) {
    if (static_cast<std::size_t>(x.size()) != dimension_ || static_cast<std::size_t>(v.size()) != dimension_) {
      throw ContractViolation{"Skeleton::append: dimension mismatch"};
    }
    times_.push_back(t);
    positions_.insert(positions_.end(), x.data(), x.data() + x.size());
    velocities_.insert(velocities_.end(), v.data(), v.data() + v.size());
    kinds_.push_back(kind);
    indices_.push_back(index);
  }

  [[nodiscard]] std::size_t size() const noexcept { return times_.size(); }
  [[nodiscard]] bool empty() const noexcept { return times_.empty(); }
  [[nodiscard]] std::size_t dimension() const noexcept { return dimension_; }
  [[nodiscard]] double horizon() const noexcept { return horizon_; }

  [[nodiscard]] double time(std::size_t k) const { return times_[k]; }
  [[nodiscard]] Eigen::Map<const Vector> position(std::size_t k) const {
    return Eigen::Map<const Vector>(positions_.data() + k * dimension_, static_cast<Eigen::Index>(dimension_));
  }
  [[nodiscard]] Eigen::Map<const Vector> velocity(std::size_t k) const {
    return Eigen::Map<const Vector>(velocities_.data() + k * dimension_, static_cast<Eigen::Index>(dimension_));
  }
  [[nodiscard]] EventKind kind(std::size_t k) const { return kinds_[k]; }
  [[nodiscard]] int index(std::size_t k) const { return indices_[k]; }

  [[nodiscard]] SkeletonPoint point(std::size_t k) const {
    return {times_[k], position(k), velocity(k), kinds_[k], indices_[k]};
  }

  [[nodiscard]] const std::vector<double>& times() const noexcept { return times_; }

  /// Index of the last point with time <= t.
  [[nodiscard]] std::size_t segment_index(double t) const {
    if (empty() || t < times_.front() || t > horizon_) {
      throw RangeError{"Skeleton: time " + std::to_string(t) + " outside [0, " + std::to_string(horizon_) + "]"};
    }
    const auto it = std::upper_bound(times_.begin(), times_.end(), t);
    return static_cast<std::size_t>(std::distance(times_.begin(), it)) - 1;
  }

  /// Position and velocity at time t, flowing from the event immediately before t.
  [[nodiscard]] std::pair<Vector, Vector> state_at(double t) const {
    const std::size_t k = segment_index(t);
    if (times_[k] == t) {
      return {position(k), velocity(k)};
    }
    return {position(k) + (t - times_[k]) * velocity(k), velocity(k)};
  }

  /// Checks ordering, endpoints and flow consistency between consecutive points.
  void validate(double relative_tolerance = 1e-9) const {
    if (size() < 2) {
      throw ContractViolation{"Skeleton: needs at least initial and terminal points"};
    }
    if (times_.front() != 0.0 || times_.back() != horizon_) {
      throw ContractViolation{"Skeleton: must start at 0 and end at the horizon"};
    }
    for (std::size_t k = 0; k + 1 < size(); ++k) {
      if (!(times_[k + 1] > times_[k])) {
        throw ContractViolation{"Skeleton: times are not strictly increasing"};
      }
      const Vector predicted = position(k) + (times_[k + 1] - times_[k]) * velocity(k);
      const Vector actual = position(k + 1);
      for (Eigen::Index i = 0; i < actual.size(); ++i) {
        const double scale = std::max({1.0, std::abs(predicted[i]), std::abs(actual[i])});
        if (std::abs(predicted[i] - actual[i]) > relative_tolerance * scale) {
          throw ContractViolation{"Skeleton: flow inconsistency at point " + std::to_string(k + 1)};
        }
      }
    }
  }

  bool operator==(const Skeleton&) const = default;

 private:
  std::size_t dimension_ = 0;
  double horizon_ = 0.0;
  std::vector<double> times_;
  std::vector<double> positions_;
  std::vector<double> velocities_;
  std::vector<EventKind> kinds_;
  std::vector<int> indices_;
};

/// Position and velocity at time t (0 <= t <= horizon).
inline std::pair<Vector, Vector> state_at_time(const Skeleton& skeleton, double t) { return skeleton.state_at(t); }

}  // namespace ctmc::pdp

#endif  // CTMC_PDP_SKELETON_HPP

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

#ifndef CTMC_ERRORS_HPP
#define CTMC_ERRORS_HPP

#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ctmc {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was not met (non-monotone cumulative rate, bad sizes, ...).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the domain of a function (non-positive time step, zero gradient flip, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A query outside the time range covered by a skeleton.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// An experiment or sampler configuration that cannot be run.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// All particle weights vanished, resampling is undefined.
class DegenerateSystemError : public Error {
 public:
  using Error::Error;
};

/// A thinning envelope was found below the rate it is supposed to dominate.
class InvalidBoundError : public Error {
 public:
  InvalidBoundError(double time, double rate, double bound, const std::string& context = {})
      : Error{describe(time, rate, bound, context)}, time_{time}, rate_{rate}, bound_{bound} {}

  [[nodiscard]] double time() const noexcept { return time_; }
  [[nodiscard]] double rate() const noexcept { return rate_; }
  [[nodiscard]] double bound() const noexcept { return bound_; }

 private:
  static std::string describe(double time, double rate, double bound, const std::string& context) {
    std::ostringstream os;
    os.precision(17);
    os << "invalid bound at u=" << time << ": rate " << rate << " exceeds bound " << bound;
    if (!context.empty()) {
      os << " (" << context << ")";
    }
    return os.str();
  }

  double time_;
  double rate_;
  double bound_;
};

/// The simulated state left the finite reals.
class NonFiniteStateError : public Error {
 public:
  NonFiniteStateError(double time, std::vector<double> position, std::vector<double> velocity)
      : Error{describe(time, position, velocity)},
        time_{time},
        position_{std::move(position)},
        velocity_{std::move(velocity)} {}

  [[nodiscard]] double time() const noexcept { return time_; }
  [[nodiscard]] const std::vector<double>& position() const noexcept { return position_; }
  [[nodiscard]] const std::vector<double>& velocity() const noexcept { return velocity_; }

 private:
  static std::string describe(double time, const std::vector<double>& x, const std::vector<double>& v) {
    std::ostringstream os;
    os << "non-finite state at t=" << time << " x=[";
    for (std::size_t i = 0; i < x.size(); ++i) {
      os << (i ? "," : "") << x[i];
    }
    os << "] v=[";
    for (std::size_t i = 0; i < v.size(); ++i) {
      os << (i ? "," : "") << v[i];
    }
    os << "]";
    return os.str();
  }

  double time_;
  std::vector<double> position_;
  std::vector<double> velocity_;
};

}  // namespace ctmc

#endif  // CTMC_ERRORS_HPP

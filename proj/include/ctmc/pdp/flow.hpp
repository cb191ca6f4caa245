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

#ifndef CTMC_PDP_FLOW_HPP
#define CTMC_PDP_FLOW_HPP

#include <ctmc/errors.hpp>
#include <ctmc/linalg.hpp>

namespace ctmc::pdp {

/// Constant-velocity flow: the position reached after moving for `duration` along `velocity`.
inline Vector deterministic_flow(const Vector& position, const Vector& velocity, double duration) {
  if (!(duration >= 0.0)) {
    throw DomainError{"deterministic_flow: negative duration"};
  }
  if (position.size() != velocity.size()) {
    throw ContractViolation{"deterministic_flow: dimension mismatch"};
  }
  return position + duration * velocity;
}

/// Time-stamped PDP state for constant-velocity dynamics.
struct PdpState {
  double t = 0.0;
  Vector x;
  Vector v;

  [[nodiscard]] PdpState flowed(double duration) const {
    return {t + duration, deterministic_flow(x, v, duration), v};
  }
};

}  // namespace ctmc::pdp

#endif  // CTMC_PDP_FLOW_HPP

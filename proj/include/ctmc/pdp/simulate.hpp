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

#ifndef CTMC_PDP_SIMULATE_HPP
#define CTMC_PDP_SIMULATE_HPP

#include <ctmc/errors.hpp>
#include <ctmc/pdp/event_time.hpp>
#include <ctmc/pdp/flow.hpp>
#include <ctmc/pdp/rate_bound.hpp>
#include <ctmc/pdp/skeleton.hpp>
#include <ctmc/rng.hpp>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace ctmc::pdp {

/// New state chosen at an event.
struct Transition {
  Vector x;
  Vector v;
  EventKind kind = EventKind::reflection;
  int index = -1;
};

/// One competing source of events.
/**
 * `rate(anchor, s, rng)` is the event rate a time `s` after the last event, possibly a random
 * realization drawn from `rng`. `bound(anchor, remaining)` returns an envelope for it over the
 * time left in the run, and `transition` maps the pre-event state to the post-event one. Channels are superposed; the first accepted
 * proposal across all channels is the next event.
 */
struct EventChannel {
  std::function<double(const PdpState& anchor, double s, RngStream& rng)> rate;
  std::function<RateBound(const PdpState& anchor, double remaining)> bound;
  std::function<Transition(const PdpState& at_event, RngStream& rng)> transition;
  std::string name = "event";
};

struct ChannelCounters {
  std::size_t proposals = 0;
  std::size_t events = 0;
};

struct SimulationResult {
  Skeleton skeleton;
  std::vector<ChannelCounters> counters;
};

/// Simulates a constant-velocity PDP on [0, horizon].
/**
 * Iterates: draw the next event by thinning every channel's envelope (proposals are examined
 * in time order, so only the proposals before the winning event are evaluated), flow to it,
 * apply the channel's transition and record the new state. A terminal point at the horizon
 * closes the skeleton.
 */
inline SimulationResult simulate_pdp(const PdpState& initial, const std::vector<EventChannel>& channels,
                                     double horizon, RngStream& rng) {
  if (!(horizon > 0.0)) {
    throw ContractViolation{"simulate_pdp: horizon must be positive"};
  }
  if (!initial.x.allFinite() || !initial.v.allFinite()) {
    throw NonFiniteStateError{0.0, to_std(initial.x), to_std(initial.v)};
  }
  SimulationResult result{Skeleton{static_cast<std::size_t>(initial.x.size()), horizon},
                          std::vector<ChannelCounters>(channels.size())};
  PdpState anchor{0.0, initial.x, initial.v};
  result.skeleton.append(0.0, anchor.x, anchor.v, EventKind::initial);

  std::vector<PoissonProposals> streams;
  std::vector<std::optional<double>> pending(channels.size());
  streams.reserve(channels.size());

  while (true) {
    const double remaining = horizon - anchor.t;
    streams.clear();
    for (std::size_t k = 0; k < channels.size(); ++k) {
      streams.emplace_back(channels[k].bound(anchor, remaining));
      pending[k] = streams[k].next(rng);
    }

    bool fired = false;
    while (!fired) {
      std::size_t winner = channels.size();
      double earliest = kInfinity;
      for (std::size_t k = 0; k < channels.size(); ++k) {
        if (pending[k] && *pending[k] < earliest) {
          earliest = *pending[k];
          winner = k;
        }
      }
      if (winner == channels.size() || earliest >= remaining) {
        const Vector x_end = deterministic_flow(anchor.x, anchor.v, remaining);
        if (!x_end.allFinite()) {
          throw NonFiniteStateError{horizon, to_std(x_end), to_std(anchor.v)};
        }
        result.skeleton.append(horizon, x_end, anchor.v, EventKind::terminal);
        return result;
      }

      const auto& channel = channels[winner];
      ++result.counters[winner].proposals;
      const double envelope = streams[winner].bound()(earliest);
      const double rate = channel.rate(anchor, earliest, rng);
      if (exceeds_bound(rate, envelope)) {
        throw InvalidBoundError{earliest, rate, envelope, channel.name};
      }
      if (rng.uniform() * envelope < rate) {
        const PdpState before = anchor.flowed(earliest);
        if (!before.x.allFinite()) {
          throw NonFiniteStateError{before.t, to_std(before.x), to_std(before.v)};
        }
        Transition next = channel.transition(before, rng);
        if (!next.x.allFinite() || !next.v.allFinite()) {
          throw NonFiniteStateError{before.t, to_std(next.x), to_std(next.v)};
        }
        ++result.counters[winner].events;
        anchor = PdpState{before.t, std::move(next.x), std::move(next.v)};
        result.skeleton.append(anchor.t, anchor.x, anchor.v, next.kind, next.index);
        fired = true;
      } else {
        pending[winner] = streams[winner].next(rng);
      }
    }
  }
}

/// Single-channel convenience overload.
inline SimulationResult simulate_pdp(const PdpState& initial, const EventChannel& channel, double horizon,
                                     RngStream& rng) {
  return simulate_pdp(initial, std::vector<EventChannel>{channel}, horizon, rng);
}

}  // namespace ctmc::pdp

#endif  // CTMC_PDP_SIMULATE_HPP

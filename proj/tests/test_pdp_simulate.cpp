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

#include <gtest/gtest.h>

#include <ctmc/pdp/simulate.hpp>
#include <ctmc/pdp/skeleton.hpp>
#include <ctmc/pdp/skeleton_io.hpp>

#include "support/stats.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace {

using ctmc::Vector;
using ctmc::pdp::EventChannel;
using ctmc::pdp::EventKind;
using ctmc::pdp::PdpState;
using ctmc::pdp::RateBound;
using ctmc::pdp::Skeleton;
using ctmc::pdp::Transition;

Vector scalar(double x) { return Vector::Constant(1, x); }

EventChannel negation_channel(double rate) {
  return {[rate](const PdpState&, double, ctmc::RngStream&) { return rate; },
          [rate](const PdpState&, double) { return RateBound::constant(rate); },
          [](const PdpState& s, ctmc::RngStream&) { return Transition{s.x, -s.v, EventKind::reflection}; }};
}

/// Canonical 1D rate for N(0,1): max(0, v * x) along x + s v.
EventChannel gaussian_zigzag_channel() {
  return {[](const PdpState& a, double s, ctmc::RngStream&) { return std::max(0.0, a.v[0] * (a.x[0] + s * a.v[0])); },
          [](const PdpState& a, double) {
            return RateBound::positive_part_of_affine(a.v[0] * a.x[0], a.v[0] * a.v[0]);
          },
          [](const PdpState& s, ctmc::RngStream&) { return Transition{s.x, -s.v, EventKind::flip, 0}; }};
}

TEST(SimulatePdp, ZeroRateGivesStraightLine) {
  ctmc::RngStream rng{1};
  const auto result = ctmc::pdp::simulate_pdp(PdpState{0.0, scalar(1.0), scalar(0.5)}, negation_channel(0.0), 8.0, rng);
  const auto& sk = result.skeleton;
  ASSERT_EQ(sk.size(), 2u);
  EXPECT_EQ(sk.kind(0), EventKind::initial);
  EXPECT_EQ(sk.kind(1), EventKind::terminal);
  EXPECT_DOUBLE_EQ(sk.time(1), 8.0);
  EXPECT_DOUBLE_EQ(sk.position(1)[0], 1.0 + 8.0 * 0.5);
}

TEST(SimulatePdp, ConstantRateGapsAreExponential) {
  ctmc::RngStream rng{2};
  const double c = 1.7;
  const auto result =
      ctmc::pdp::simulate_pdp(PdpState{0.0, scalar(0.0), scalar(1.0)}, negation_channel(c), 6000.0, rng);
  const auto& sk = result.skeleton;
  sk.validate();
  std::vector<double> gaps;
  for (std::size_t k = 1; k + 1 < sk.size() && gaps.size() < 10000; ++k) {
    gaps.push_back(sk.time(k) - sk.time(k - 1));
  }
  ASSERT_EQ(gaps.size(), 10000u);
  EXPECT_LT(ctmc::testing::ks_one_sample(gaps, [c](double t) { return 1.0 - std::exp(-c * t); }), 0.03);
}

TEST(SimulatePdp, ZigZagEventRateOnStandardNormal) {
  // Oracle: E[max(0, X)] for X ~ N(0,1) by quadrature.
  const double expected = ctmc::testing::simpson(
      [](double x) { return std::max(0.0, x) * std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }, -12.0,
      12.0, 24000);
  EXPECT_NEAR(expected, 1.0 / std::sqrt(2.0 * std::numbers::pi), 1e-9);

  ctmc::RngStream rng{3};
  const double horizon = 1e4;
  const auto result =
      ctmc::pdp::simulate_pdp(PdpState{0.0, scalar(0.0), scalar(1.0)}, gaussian_zigzag_channel(), horizon, rng);
  result.skeleton.validate();
  const double per_unit_time = static_cast<double>(result.counters[0].events) / horizon;
  EXPECT_NEAR(per_unit_time, expected, 0.05 * expected);
  // Exact envelope: every proposal is accepted.
  EXPECT_EQ(result.counters[0].proposals, result.counters[0].events);
}

TEST(SimulatePdp, ReproducibleForSameStream) {
  ctmc::RngStream a{77, 3};
  ctmc::RngStream b{77, 3};
  ctmc::RngStream c{77, 4};
  const PdpState start{0.0, scalar(0.3), scalar(-1.0)};
  const auto ra = ctmc::pdp::simulate_pdp(start, gaussian_zigzag_channel(), 500.0, a);
  const auto rb = ctmc::pdp::simulate_pdp(start, gaussian_zigzag_channel(), 500.0, b);
  const auto rc = ctmc::pdp::simulate_pdp(start, gaussian_zigzag_channel(), 500.0, c);
  EXPECT_EQ(ra.skeleton, rb.skeleton);
  EXPECT_NE(ra.skeleton, rc.skeleton);
}

TEST(SimulatePdp, InjectedLowBoundIsReported) {
  auto channel = gaussian_zigzag_channel();
  channel.bound = [](const PdpState&, double) { return RateBound::constant(0.5); };
  ctmc::RngStream rng{4};
  EXPECT_THROW(ctmc::pdp::simulate_pdp(PdpState{0.0, scalar(0.0), scalar(1.0)}, channel, 1e4, rng),
               ctmc::InvalidBoundError);
}

TEST(SimulatePdp, NonFiniteStateAborts) {
  ctmc::RngStream rng{5};
  EXPECT_THROW(
      ctmc::pdp::simulate_pdp(PdpState{0.0, scalar(0.0), scalar(1e308)}, negation_channel(1.0), 1e3, rng),
      ctmc::NonFiniteStateError);
}

TEST(SimulatePdp, CompetingChannelsSplitEventsByRate) {
  ctmc::RngStream rng{6};
  auto refresh = negation_channel(3.0);
  refresh.transition = [](const PdpState& s, ctmc::RngStream&) { return Transition{s.x, s.v, EventKind::refresh}; };
  const auto result = ctmc::pdp::simulate_pdp(PdpState{0.0, scalar(0.0), scalar(1.0)},
                                              {negation_channel(1.0), refresh}, 5000.0, rng);
  const double share = static_cast<double>(result.counters[1].events) /
                       static_cast<double>(result.counters[0].events + result.counters[1].events);
  EXPECT_NEAR(share, 0.75, 0.01);
}

TEST(StateAtTime, InterpolatesPiecewiseLinearPath) {
  Skeleton sk{1, 5.0};
  sk.append(0.0, scalar(0.0), scalar(1.0), EventKind::initial);
  sk.append(2.0, scalar(2.0), scalar(-1.0), EventKind::reflection);
  sk.append(5.0, scalar(-1.0), scalar(-1.0), EventKind::terminal);
  sk.validate();

  auto [x3, v3] = ctmc::pdp::state_at_time(sk, 3.0);
  EXPECT_DOUBLE_EQ(x3[0], 1.0);
  EXPECT_DOUBLE_EQ(v3[0], -1.0);

  auto [x2, v2] = ctmc::pdp::state_at_time(sk, 2.0);
  EXPECT_EQ(x2[0], 2.0);
  EXPECT_EQ(v2[0], -1.0);

  auto [x0, v0] = ctmc::pdp::state_at_time(sk, 0.0);
  EXPECT_EQ(x0[0], 0.0);
  EXPECT_EQ(v0[0], 1.0);

  EXPECT_THROW((void)ctmc::pdp::state_at_time(sk, -0.1), ctmc::RangeError);
  EXPECT_THROW((void)ctmc::pdp::state_at_time(sk, 5.1), ctmc::RangeError);
}

TEST(SkeletonJsonLines, RoundTripsSimulatedPaths) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    ctmc::RngStream rng{seed};
    const auto sk = ctmc::pdp::simulate_pdp(PdpState{0.0, scalar(0.1 * seed), scalar(1.0)},
                                            gaussian_zigzag_channel(), 200.0, rng)
                        .skeleton;
    std::stringstream buffer;
    ctmc::pdp::write_skeleton_jsonl(buffer, sk, seed, 9);
    const auto [header, restored] = ctmc::pdp::read_skeleton_jsonl(buffer);
    EXPECT_EQ(header.seed, seed);
    EXPECT_EQ(header.stream, 9u);
    EXPECT_EQ(header.dimension, 1u);
    EXPECT_EQ(restored, sk);
  }
}

TEST(SkeletonJsonLines, HeaderAndKindFields) {
  Skeleton sk{2, 1.0};
  sk.append(0.0, Vector::Zero(2), Vector::Ones(2), EventKind::initial);
  sk.append(0.5, Vector::Constant(2, 0.5), Vector::Ones(2), EventKind::flip, 1);
  sk.append(1.0, Vector::Constant(2, 1.0), Vector::Ones(2), EventKind::terminal);
  std::stringstream buffer;
  ctmc::pdp::write_skeleton_jsonl(buffer, sk, 42, 0);
  std::string header;
  std::getline(buffer, header);
  const auto json = nlohmann::json::parse(header);
  EXPECT_EQ(json.at("d"), 2);
  EXPECT_EQ(json.at("T"), 1.0);
  EXPECT_EQ(json.at("seed"), 42);
  std::string line;
  std::getline(buffer, line);
  std::getline(buffer, line);
  EXPECT_EQ(nlohmann::json::parse(line).at("kind"), "flip(1)");
}

}  // namespace

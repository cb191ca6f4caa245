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

#include <ctmc/pdp/event_time.hpp>
#include <ctmc/pdp/flow.hpp>
#include <ctmc/pdp/rate_bound.hpp>

#include "support/stats.hpp"

#include <cmath>
#include <vector>

namespace {

using ctmc::Vector;
using ctmc::pdp::BoundSegment;
using ctmc::pdp::RateBound;

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

TEST(DeterministicFlow, LinearMotion) {
  EXPECT_EQ(ctmc::pdp::deterministic_flow(vec({1}), vec({2}), 0.5), vec({2}));
  EXPECT_EQ(ctmc::pdp::deterministic_flow(vec({0, 0}), vec({1, -1}), 0.0), vec({0, 0}));
  EXPECT_EQ(ctmc::pdp::deterministic_flow(vec({3, 4}), vec({-1, 0}), 3.0), vec({0, 4}));
}

TEST(DeterministicFlow, RejectsNegativeDuration) {
  EXPECT_THROW(ctmc::pdp::deterministic_flow(vec({0}), vec({1}), -1.0), ctmc::DomainError);
}

TEST(RateBound, RejectsMalformedSegments) {
  EXPECT_THROW(RateBound(std::vector<BoundSegment>{}), ctmc::ContractViolation);
  EXPECT_THROW(RateBound({BoundSegment{0.5, 1.0, 1.0, 0.0}}), ctmc::ContractViolation);
  EXPECT_THROW(RateBound({BoundSegment{0.0, 1.0, 1.0, 0.0}, BoundSegment{1.5, 2.0, 1.0, 0.0}}),
               ctmc::ContractViolation);
  EXPECT_THROW(RateBound({BoundSegment{0.0, 2.0, 1.0, -1.0}}), ctmc::ContractViolation);
  EXPECT_THROW(RateBound::linear(1.0, -1.0), ctmc::ContractViolation);
}

TEST(RateBound, EvaluatesAndIntegrates) {
  const RateBound bound({BoundSegment{0.0, 1.0, 2.0, 0.0}, BoundSegment{1.0, 3.0, 2.0, 1.0}});
  EXPECT_DOUBLE_EQ(bound(0.5), 2.0);
  EXPECT_DOUBLE_EQ(bound(2.0), 3.0);
  EXPECT_DOUBLE_EQ(bound.integral(0.0, 3.0), 2.0 + 2.0 * 2.0 + 0.5 * 4.0);
}

TEST(RateBound, PositivePartOfAffineIsExact) {
  for (double a : {-2.0, -0.5, 0.0, 0.7, 3.0}) {
    for (double b : {-1.5, 0.0, 0.25, 2.0}) {
      const auto bound = RateBound::positive_part_of_affine(a, b, 10.0);
      for (double u = 0.0; u < 10.0; u += 0.01) {
        EXPECT_NEAR(bound(u), std::max(0.0, a + b * u), 1e-12) << a << " " << b << " " << u;
      }
    }
  }
}

TEST(RateBound, PointwiseMaxDominatesBoth) {
  const auto v_shape = RateBound({BoundSegment{0.0, 2.0, 3.0, -1.5}, BoundSegment{2.0, ctmc::pdp::kInfinity, 0.0, 1.5}});
  const auto flat = RateBound::constant(1.0);
  const auto both = ctmc::pdp::pointwise_max(v_shape, flat);
  for (double u = 0.0; u < 8.0; u += 0.003) {
    EXPECT_NEAR(both(u), std::max(v_shape(u), flat(u)), 1e-12) << u;
  }
}

TEST(FirstEventInversion, ClosedForms) {
  const ctmc::pdp::CumulativeRate constant{[](double s) { return 2.0 * s; }, [](double u) { return u / 2.0; }};
  EXPECT_DOUBLE_EQ(*ctmc::pdp::first_event_inversion(constant, 1.0), 0.5);

  const ctmc::pdp::CumulativeRate linear{[](double s) { return s * s; }, [](double u) { return std::sqrt(u); }};
  EXPECT_DOUBLE_EQ(*ctmc::pdp::first_event_inversion(linear, 4.0), 2.0);

  // Numeric inversion agrees with the closed form.
  const ctmc::pdp::CumulativeRate numeric{[](double s) { return s * s; }, {}};
  EXPECT_NEAR(*ctmc::pdp::first_event_inversion(numeric, 4.0, 10.0), 2.0, 1e-12);
}

TEST(FirstEventInversion, ZeroRateNeverFires) {
  const ctmc::pdp::CumulativeRate zero{[](double) { return 0.0; }, {}};
  EXPECT_FALSE(ctmc::pdp::first_event_inversion(zero, 0.3, 100.0).has_value());
  EXPECT_FALSE(ctmc::pdp::first_event_inversion(zero, 5.0, 1e6).has_value());
}

TEST(FirstEventInversion, RejectsNonMonotoneCumulative) {
  const ctmc::pdp::CumulativeRate wiggly{[](double s) { return std::sin(s); }, {}};
  EXPECT_THROW(ctmc::pdp::first_event_inversion(wiggly, 0.5, 10.0), ctmc::ContractViolation);
}

TEST(FirstEventThinning, ExactBoundAcceptsFirstProposal) {
  ctmc::RngStream rng{11};
  const auto bound = RateBound::constant(3.0);
  for (int k = 0; k < 1000; ++k) {
    const auto result = ctmc::pdp::first_event_thinning(bound, [](double) { return 3.0; }, rng);
    ASSERT_TRUE(result.time.has_value());
    EXPECT_EQ(result.proposals, 1u);
  }
}

TEST(FirstEventThinning, ZeroRateConsumesPoissonManyProposals) {
  ctmc::RngStream rng{12};
  const double c = 2.5;
  const double horizon = 4.0;
  const auto bound = RateBound::constant(c, horizon);
  double total = 0.0;
  const int replicates = 20000;
  for (int k = 0; k < replicates; ++k) {
    const auto result = ctmc::pdp::first_event_thinning(bound, [](double) { return 0.0; }, rng);
    EXPECT_FALSE(result.time.has_value());
    total += static_cast<double>(result.proposals);
  }
  const double mean = total / replicates;
  const double se = std::sqrt(c * horizon / replicates);
  EXPECT_NEAR(mean, c * horizon, 4.0 * se);
}

TEST(FirstEventThinning, MatchesInversionForLinearRate) {
  // Oracle: inversion of Lambda(s) = s^2 / 2 gives s = sqrt(2 E).
  ctmc::RngStream rng_thin{21};
  ctmc::RngStream rng_inv{22};
  const auto bound = RateBound::linear(0.0, 1.0, 10.0);
  const ctmc::pdp::CumulativeRate cumulative{[](double s) { return 0.5 * s * s; },
                                              [](double u) { return std::sqrt(2.0 * u); }};
  std::vector<double> thinned;
  std::vector<double> inverted;
  for (int k = 0; k < 10000; ++k) {
    const auto t = ctmc::pdp::first_event_thinning(bound, [](double u) { return u; }, rng_thin);
    thinned.push_back(t.time.value_or(10.0));
    inverted.push_back(ctmc::pdp::first_event_inversion(cumulative, rng_inv.exponential(), 10.0).value_or(10.0));
  }
  EXPECT_LT(ctmc::testing::ks_two_sample(thinned, inverted), 0.03);
}

TEST(FirstEventThinning, LooseEnvelopeHasSameLaw) {
  // A decreasing-then-flat envelope well above the true rate still gives Exp(1) times.
  ctmc::RngStream rng{31};
  const RateBound bound({BoundSegment{0.0, 1.0, 3.0, -1.0}, BoundSegment{1.0, ctmc::pdp::kInfinity, 2.0, 0.0}});
  std::vector<double> times;
  for (int k = 0; k < 10000; ++k) {
    times.push_back(*ctmc::pdp::first_event_thinning(bound, [](double) { return 1.0; }, rng).time);
  }
  EXPECT_LT(ctmc::testing::ks_one_sample(times, [](double t) { return 1.0 - std::exp(-t); }), 0.02);
}

TEST(FirstEventThinning, DetectsInvalidBound) {
  ctmc::RngStream rng{41};
  const auto bound = RateBound::constant(1.0);
  try {
    (void)ctmc::pdp::first_event_thinning(bound, [](double u) { return 0.5 + u; }, rng, 100.0);
    FAIL() << "expected InvalidBoundError";
  } catch (const ctmc::InvalidBoundError& e) {
    EXPECT_GT(e.rate(), e.bound());
    EXPECT_GT(e.time(), 0.5);
  }
}

TEST(PoissonProposals, DecreasingSegmentCarriesResidualBudget) {
  // First segment has total mass 0.5; the rest must come from the flat tail.
  const RateBound bound({BoundSegment{0.0, 1.0, 1.0, -1.0}, BoundSegment{1.0, ctmc::pdp::kInfinity, 1.0, 0.0}});
  ctmc::RngStream rng{51};
  std::vector<double> first;
  for (int k = 0; k < 20000; ++k) {
    ctmc::pdp::PoissonProposals proposals{bound};
    first.push_back(*proposals.next(rng));
  }
  // CDF of the first point: 1 - exp(-Lambda(t)).
  auto cdf = [](double t) {
    const double lambda = t < 1.0 ? t - 0.5 * t * t : 0.5 + (t - 1.0);
    return 1.0 - std::exp(-lambda);
  };
  EXPECT_LT(ctmc::testing::ks_one_sample(first, cdf), 0.015);
}

}  // namespace

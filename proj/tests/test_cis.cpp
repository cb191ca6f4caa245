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

#include <ctmc/cis/cis.hpp>
#include <ctmc/cis/proposal.hpp>
#include <ctmc/cis/rho.hpp>
#include <ctmc/cis/smc.hpp>
#include <ctmc/cis/variance_study.hpp>
#include <ctmc/targets/bounds.hpp>
#include <ctmc/targets/control_variate.hpp>
#include <ctmc/targets/gaussian.hpp>
#include <ctmc/targets/mixture.hpp>
#include <ctmc/targets/posterior.hpp>

#include "support/stats.hpp"

#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

namespace {

using ctmc::RngStream;
using ctmc::Vector;
using namespace ctmc::cis;
using ctmc::targets::GaussianTarget;
using ctmc::targets::MixtureTarget;

Vector scalar(double x) { return Vector::Constant(1, x); }

struct MixtureFixture {
  MixtureTarget target;
  double mode;
  double sd;
};

const MixtureFixture& mixture150() {
  static const MixtureFixture fixture = [] {
    RngStream rng{2024};
    MixtureTarget target{ctmc::targets::simulate_mixture_data(150, rng)};
    const auto interval = ctmc::targets::search_interval(target.data());
    const auto q = ctmc::targets::posterior_quadrature(target, interval.lo, interval.hi);
    return MixtureFixture{std::move(target), q.mode(), q.sd()};
  }();
  return fixture;
}

/// Equal-weight Gaussian factors N(m_i, n) with spread-out centres, so per-factor gradients differ.
GaussianTarget spread_gaussian(std::size_t n) {
  std::vector<Vector> means;
  std::vector<ctmc::Matrix> precisions;
  for (std::size_t i = 0; i < n; ++i) {
    means.push_back(scalar(-2.0 + 4.0 * static_cast<double>(i) / static_cast<double>(n - 1)));
    precisions.push_back(ctmc::Matrix::Constant(1, 1, 1.0));
  }
  return GaussianTarget{std::move(means), std::move(precisions)};
}

TEST(BrownianProposal, Examples) {
  const BrownianProposal q;
  EXPECT_NEAR(q.density(1.0, scalar(0.3), scalar(0.3)), 1.0 / std::sqrt(2.0 * std::numbers::pi), 1e-15);
  EXPECT_NEAR(q.density(1.0, scalar(0.3), scalar(0.3)), 0.3989, 1e-4);
  EXPECT_DOUBLE_EQ(q.density(0.7, scalar(1.5), scalar(0.2)), q.density(0.7, scalar(-1.1), scalar(0.2)));
  Vector x(2), y(2);
  x << 0.4, -1.0;
  y << 0.0, 0.5;
  const double product = std::exp(-0.16 / 0.6) / std::sqrt(0.6 * std::numbers::pi) *
                         std::exp(-2.25 / 0.6) / std::sqrt(0.6 * std::numbers::pi);
  EXPECT_NEAR(q.density(0.3, x, y), product, 1e-14);
  EXPECT_THROW((void)q.density(0.0, x, y), ctmc::DomainError);
  EXPECT_THROW((void)q.density(-1.0, x, y), ctmc::DomainError);
}

TEST(Proposal, DensitiesIntegrateToOne) {
  const BrownianProposal brownian;
  const double b = ctmc::testing::simpson([&](double x) { return brownian.density(1.0, scalar(x), scalar(0.4)); },
                                       -15.0, 15.0);
  EXPECT_NEAR(b, 1.0, 1e-4);
  for (double nu : {1.5, 3.0, 10.0}) {
    const StudentTProposal t{nu};
    // Substitute x = tan(u) to integrate the heavy tails over a finite range.
    const double mass = ctmc::testing::simpson(
        [&](double u) {
          const double x = std::tan(u);
          return t.density(1.0, scalar(x), scalar(0.0)) * (1.0 + x * x);
        },
        -std::numbers::pi / 2 + 1e-9, std::numbers::pi / 2 - 1e-9, 200000);
    EXPECT_NEAR(mass, 1.0, 1e-4) << "nu=" << nu;
  }
}

TEST(Proposal, StudentTMatchesUnivariateT) {
  const StudentTProposal t{4.0};
  // Student-t with 4 degrees of freedom at 1: 3/8 (1 + 1/4)^{-5/2}.
  EXPECT_NEAR(t.density(1.0, scalar(1.0), scalar(0.0)), 0.375 * std::pow(1.25, -2.5), 1e-14);
  // Scale s stretches by sqrt(s).
  EXPECT_NEAR(t.density(4.0, scalar(2.0), scalar(0.0)), 0.5 * t.density(1.0, scalar(1.0), scalar(0.0)), 1e-14);
}

TEST(Proposal, SamplesMatchDensity) {
  RngStream rng{7};
  const BrownianProposal brownian;
  const StudentTProposal t{3.0};
  std::vector<double> bs, ts;
  for (int i = 0; i < 20000; ++i) {
    bs.push_back(sample_proposal(brownian, 2.0, scalar(1.0), rng)[0]);
    ts.push_back(sample_proposal(t, 2.0, scalar(1.0), rng)[0]);
  }
  const auto normal_cdf = [](double x) { return ctmc::testing::standard_normal_cdf((x - 1.0) / std::sqrt(2.0)); };
  EXPECT_LT(ctmc::testing::ks_one_sample(bs, normal_cdf), 0.015);
  const auto t_cdf = [&](double x) {
    return ctmc::testing::simpson([&](double u) { return t.density(2.0, scalar(u), scalar(1.0)); }, -400.0, x, 4000);
  };
  std::vector<double> head(ts.begin(), ts.begin() + 2000);
  EXPECT_LT(ctmc::testing::ks_one_sample(head, t_cdf), 0.035);
}

TEST(Proposal, StudentTDerivativesMatchFiniteDifferences) {
  const StudentTProposal t{3.5};
  const double e = 1e-5;
  for (double x : {-2.0, 0.1, 1.7}) {
    const double y = 0.4;
    const double s = 0.8;
    const auto q = [&](double a, double ss) { return t.density(ss, scalar(a), scalar(y)); };
    EXPECT_NEAR(t.time_derivative(s, scalar(x), scalar(y)), (q(x, s + e) - q(x, s - e)) / (2 * e), 1e-8);
    EXPECT_NEAR(t.gradient(s, scalar(x), scalar(y))[0], (q(x + e, s) - q(x - e, s)) / (2 * e), 1e-8);
    EXPECT_NEAR(t.laplacian(s, scalar(x), scalar(y)), (q(x + 1e-4, s) - 2 * q(x, s) + q(x - 1e-4, s)) / 1e-8, 1e-5);
  }
}

TEST(KernelScaleRho, BrownianKernelMatchesScaleRho) {
  const auto& f = mixture150();
  const auto rho = kernel_scale_rho(f.target, BrownianProposal{});
  RngStream rng{4};
  for (double offset : {-1.0, 0.0, 2.0}) {
    const Vector x = scalar(f.mode + offset * f.sd);
    const double exact = scale_rho(f.target, x);
    EXPECT_LT(ctmc::relative_difference(rho.evaluate(x, scalar(f.mode), 0.3, rng), exact, 1.0), 1e-9);
  }
}

TEST(ScaleRho, GaussianClosedForm) {
  const auto target = GaussianTarget::standard(1);
  RngStream rng{3};
  for (int i = 0; i < 100; ++i) {
    const double x = -5.0 + 10.0 * rng.uniform();
    EXPECT_NEAR(scale_rho(target, scalar(x)), 0.5 * (1.0 - x * x), 1e-12);
    // Density form: -phi''/(2 phi) with phi'' = (x^2 - 1) phi.
    const double phi = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
    const double phi2 = (x * x - 1.0) * phi;
    EXPECT_NEAR(scale_rho(target, scalar(x)), -0.5 * phi2 / phi, 1e-9 * std::max(1.0, std::abs(phi2 / phi)));
  }
  EXPECT_DOUBLE_EQ(scale_rho(target, scalar(0.0)), 0.5);
  EXPECT_DOUBLE_EQ(scale_rho(target, scalar(1.0)), 0.0);
}

TEST(ScaleRho, MixtureMatchesFiniteDifferencesAndIsMultimodal) {
  const auto& f = mixture150();
  const auto lp = [&](double x) { return ctmc::targets::log_pi(f.target, scalar(x)); };
  const double h = 1e-4;
  std::vector<double> grid, values;
  for (double x = f.mode - 6.0 * f.sd; x <= f.mode + 6.0 * f.sd; x += f.sd / 50.0) {
    const double g = (lp(x + h) - lp(x - h)) / (2.0 * h);
    const double c = (lp(x + h) - 2.0 * lp(x) + lp(x - h)) / (h * h);
    const double rho = scale_rho(f.target, scalar(x));
    EXPECT_NEAR(rho, -0.5 * (c + g * g), 1e-3 * std::max(1.0, std::abs(rho))) << "x=" << x;
    grid.push_back(x);
    values.push_back(rho);
  }
  int peaks = 0;
  for (std::size_t k = 1; k + 1 < values.size(); ++k) {
    peaks += values[k] > values[k - 1] && values[k] > values[k + 1];
  }
  EXPECT_GE(peaks, 2);
}

TEST(ScaleRho, MeanZeroUnderPosterior) {
  const auto& f = mixture150();
  const auto interval = ctmc::targets::search_interval(f.target.data());
  const auto q = ctmc::targets::posterior_quadrature(f.target, interval.lo, interval.hi);
  const auto rho = [&](double x) { return scale_rho(f.target, scalar(x)); };
  const double m = q.expectation(rho);
  const double scale = std::sqrt(q.expectation([&](double x) { return rho(x) * rho(x); }));
  EXPECT_LT(std::abs(m) / scale, 1e-3);
}

TEST(ScaleRho, StationaryFokkerPlanckResidual) {
  // 1/2 pi'' + rho pi = 0 for the normalized posterior, with pi'' by central differences.
  const auto& f = mixture150();
  const auto interval = ctmc::targets::search_interval(f.target.data());
  const auto q = ctmc::targets::posterior_quadrature(f.target, interval.lo, interval.hi);
  const double h = 1e-3;
  double peak = 0.0;
  double worst = 0.0;
  for (double x = f.mode - 5.0 * f.sd; x <= f.mode + 5.0 * f.sd; x += f.sd / 40.0) {
    const double second = (q.density(x + h) - 2.0 * q.density(x) + q.density(x - h)) / (h * h);
    peak = std::max(peak, std::abs(second));
    worst = std::max(worst, std::abs(0.5 * second + scale_rho(f.target, scalar(x)) * q.density(x)));
  }
  EXPECT_LT(worst / peak, 1e-6);
}

TEST(ScaleRhoSubsample, SingleFactorEqualsExact) {
  const GaussianTarget target{{scalar(0.7)}, {ctmc::Matrix::Constant(1, 1, 2.0)}};
  for (double x : {-1.0, 0.0, 2.5}) {
    EXPECT_NEAR(scale_rho_subsample(target, scalar(x), 0, 0), scale_rho(target, scalar(x)), 1e-14);
  }
}

TEST(ScaleRhoSubsample, UnbiasedByEnumeration) {
  const auto& f = mixture150();
  const std::size_t n = f.target.factor_count();
  for (double offset : {-2.0, 0.0, 0.5, 3.0}) {
    const Vector x = scalar(f.mode + offset * f.sd);
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) sum += scale_rho_subsample(f.target, x, j, k);
    }
    const double exact = scale_rho(f.target, x);
    EXPECT_LT(ctmc::relative_difference(sum / static_cast<double>(n * n), exact, 1.0), 1e-9) << offset;
  }
}

TEST(ScaleRhoSubsample, MagnitudeGrowsLikeNSquared) {
  // Spread of the estimator over (j, k) scales as n^2 at a fixed point.
  std::vector<double> ns, sds;
  for (std::size_t n : {10, 100, 1000}) {
    const auto target = spread_gaussian(n);
    const Vector x = scalar(0.3);
    RngStream rng{n};
    std::vector<double> draws;
    for (int i = 0; i < 20000; ++i) draws.push_back(scale_rho_subsample(target, x, rng));
    ns.push_back(static_cast<double>(n));
    sds.push_back(std::sqrt(ctmc::testing::variance(draws)));
  }
  EXPECT_NEAR(ctmc::testing::log_log_slope(ns, sds), 2.0, 0.3);
}

TEST(ScaleRhoCv, AnchorGivesRhoHat) {
  const auto& f = mixture150();
  const auto cache = ctmc::targets::make_control_variate_cache(f.target, scalar(f.mode));
  for (std::size_t j = 0; j < f.target.factor_count(); j += 7) {
    for (std::size_t k = 0; k < f.target.factor_count(); k += 11) {
      EXPECT_EQ(scale_rho_cv(f.target, cache, scalar(f.mode), j, k), cache.rho_hat);
    }
  }
  EXPECT_NEAR(cache.rho_hat, scale_rho(f.target, scalar(f.mode)), 1e-9 * std::abs(cache.rho_hat));
}

TEST(ScaleRhoCv, UnbiasedByEnumeration) {
  const auto& f = mixture150();
  const std::size_t n = f.target.factor_count();
  const auto cache = ctmc::targets::make_control_variate_cache(f.target, scalar(f.mode));
  for (double offset : {-1.0, 0.25, 2.0}) {
    const Vector x = scalar(f.mode + offset * f.sd);
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) sum += scale_rho_cv(f.target, cache, x, j, k);
    }
    const double exact = scale_rho(f.target, x);
    EXPECT_LT(ctmc::relative_difference(sum / static_cast<double>(n * n), exact, 1.0), 1e-9) << offset;
  }
}

TEST(ScaleRhoCv, LowerVarianceThanSimpleNearAnchor) {
  const auto& f = mixture150();
  const std::size_t n = f.target.factor_count();
  const auto cache = ctmc::targets::make_control_variate_cache(f.target, scalar(f.mode));
  const auto variance_over_pairs = [&](auto&& estimator) {
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        const double v = estimator(j, k);
        s1 += v;
        s2 += v * v;
      }
    }
    const double m = static_cast<double>(n * n);
    return s2 / m - (s1 / m) * (s1 / m);
  };
  for (double offset : {-0.25, -0.1, 0.1, 0.25}) {
    const Vector x = scalar(f.mode + offset * f.sd);
    const double cv = variance_over_pairs([&](auto j, auto k) { return scale_rho_cv(f.target, cache, x, j, k); });
    const double simple = variance_over_pairs([&](auto j, auto k) { return scale_rho_subsample(f.target, x, j, k); });
    EXPECT_LT(cv, simple) << "offset " << offset << " sd";
  }
}

TEST(ScaleRhoCv, RejectsMismatchedCache) {
  const auto& f = mixture150();
  const auto other = GaussianTarget::standard(1);
  auto cache = std::make_shared<const ctmc::targets::ControlVariateCache>(
      ctmc::targets::make_control_variate_cache(other, scalar(0.0)));
  EXPECT_THROW((void)cv_scale_rho(f.target, cache), ctmc::ConfigError);
  EXPECT_THROW((void)cv_scale_rho(f.target, nullptr), ctmc::ConfigError);
}

TEST(LangevinRho, Examples) {
  const auto target = GaussianTarget::standard(1);
  for (double s : {0.01, 1.0, 50.0}) {
    for (double x : {-2.0, 0.0, 3.0}) EXPECT_DOUBLE_EQ(langevin_rho(target, scalar(x), scalar(x), s), 0.5);
  }
  EXPECT_THROW((void)langevin_rho(target, scalar(0.0), scalar(1.0), 0.0), ctmc::DomainError);
  EXPECT_THROW((void)langevin_rho_subsample(target, scalar(0.0), scalar(1.0), -1.0, 0), ctmc::DomainError);
}

TEST(LangevinRho, SubsampleUnbiasedByEnumeration) {
  const auto& f = mixture150();
  const std::size_t n = f.target.factor_count();
  const Vector y = scalar(f.mode);
  for (double offset : {-1.0, 0.3, 2.0}) {
    const Vector x = scalar(f.mode + offset * f.sd);
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) sum += langevin_rho_subsample(f.target, x, y, 0.2, j);
    EXPECT_LT(ctmc::relative_difference(sum / static_cast<double>(n), langevin_rho(f.target, x, y, 0.2), 1.0), 1e-9);
  }
}

TEST(LangevinRho, VarianceScalesInverselyWithTime) {
  const auto target = GaussianTarget::standard(1);
  const BrownianProposal q;
  std::vector<double> ss, vars;
  for (double s : {1e-3, 1e-2, 1e-1}) {
    RngStream rng{static_cast<std::uint64_t>(1.0 / s)};
    std::vector<double> draws;
    const Vector y = scalar(1.0);
    for (int i = 0; i < 20000; ++i) draws.push_back(langevin_rho(target, q.sample(s, y, rng), y, s));
    ss.push_back(s);
    vars.push_back(ctmc::testing::variance(draws));
  }
  EXPECT_NEAR(ctmc::testing::log_log_slope(ss, vars), -1.0, 0.2);
}

TEST(IncrementalRhoGeneric, BrownianTargetGivesZero) {
  const BrownianProposal q;
  const auto density = [&](const Vector& x, const Vector& y, double s) { return q.density(s, x, y); };
  const auto dq = [&](const Vector& x, const Vector& y, double s) { return q.time_derivative(s, x, y); };
  const auto lstar = [&](const Vector& x, const Vector& y, double s) { return 0.5 * q.laplacian(s, x, y); };
  RngStream rng{5};
  for (int i = 0; i < 50; ++i) {
    Vector x(2), y(2);
    x << rng.normal(), rng.normal();
    y << rng.normal(), rng.normal();
    const double s = 0.1 + rng.uniform();
    EXPECT_NEAR(incremental_rho_generic(lstar, dq, density, x, y, s), 0.0, 1e-12);
  }
  const auto zero = [](const Vector&, const Vector&, double) { return 0.0; };
  EXPECT_THROW((void)incremental_rho_generic(lstar, dq, zero, scalar(0.0), scalar(0.0), 1.0), ctmc::DomainError);
}

TEST(IncrementalRhoGeneric, MatchesScaleAndLangevin) {
  const auto& f = mixture150();
  const BrownianProposal q;
  const auto density = [&](const Vector& x, const Vector& y, double s) { return q.density(s, x, y); };
  const auto dq = [&](const Vector& x, const Vector& y, double s) { return q.time_derivative(s, x, y); };
  // Killed Brownian motion: L* p = p''/2 - kappa p with kappa = (|grad log pi|^2 + laplacian log pi) / 2.
  const auto kappa = [&](const Vector& x) {
    const Vector g = ctmc::targets::grad_log_pi(f.target, x);
    return 0.5 * (g.squaredNorm() + ctmc::targets::second_deriv_diag(f.target, x).sum());
  };
  const auto scale_lstar = [&](const Vector& x, const Vector& y, double s) {
    return 0.5 * q.laplacian(s, x, y) - kappa(x) * q.density(s, x, y);
  };
  // Langevin diffusion dX = grad log pi / 2 dt + dW: L* p = -div(p grad log pi / 2) + p''/2.
  const auto langevin_lstar = [&](const Vector& x, const Vector& y, double s) {
    const Vector g = ctmc::targets::grad_log_pi(f.target, x);
    const double lap = ctmc::targets::second_deriv_diag(f.target, x).sum();
    return -0.5 * (lap * q.density(s, x, y) + g.dot(q.gradient(s, x, y))) + 0.5 * q.laplacian(s, x, y);
  };
  for (double offset : {-2.0, -0.3, 0.0, 1.0}) {
    const Vector x = scalar(f.mode + offset * f.sd);
    const Vector y = scalar(f.mode + 0.4 * f.sd);
    const double s = 0.05;
    const double scale = scale_rho(f.target, x);
    EXPECT_LT(ctmc::relative_difference(incremental_rho_generic(scale_lstar, dq, density, x, y, s), scale, 1.0),
              1e-9);
    const double lang = langevin_rho(f.target, x, y, s);
    EXPECT_LT(ctmc::relative_difference(incremental_rho_generic(langevin_lstar, dq, density, x, y, s), lang, 1.0),
              1e-9);
  }
}

TEST(CisStep, ZeroRhoKeepsUnitWeight) {
  RngStream rng{11};
  const auto run = run_cis_scale(scalar(0.0), zero_rho(), constant_event_rate(10.0), 100.0, rng);
  EXPECT_GT(run.counters.events, 900u);
  for (const auto& draw : run.trajectory) EXPECT_EQ(draw.w, 1.0);
  EXPECT_EQ(run.particle.w, 1.0);
  EXPECT_EQ(run.final_draw.w, 1.0);
  EXPECT_EQ(run.counters.sign_changes, 0u);
}

TEST(CisStep, ConstantRhoGrowthLaw) {
  for (double c : {0.5, -0.8}) {
    const RhoFn rho{[c](const Vector&, const Vector&, double, RngStream&) { return c; }, 0, "constant"};
    RngStream rng{static_cast<std::uint64_t>(100 + 10 * c)};
    std::vector<double> weights;
    for (int r = 0; r < 10000; ++r) {
      RngStream local = rng.substream(static_cast<std::uint64_t>(r));
      weights.push_back(run_cis_scale(scalar(0.0), rho, constant_event_rate(2.0), 1.0, local, false).particle.w);
    }
    const double se = std::sqrt(ctmc::testing::variance(weights) / 10000.0);
    EXPECT_NEAR(ctmc::testing::mean(weights), std::exp(c), 3.0 * se) << "c=" << c;
  }
}

TEST(CisStep, NegativeFactorsFlipSign) {
  const RhoFn rho{[](const Vector&, const Vector&, double, RngStream&) { return -3.0; }, 0, "constant"};
  RngStream rng{12};
  const auto run = run_cis_scale(scalar(0.0), rho, constant_event_rate(1.0), 20.0, rng);
  EXPECT_EQ(run.counters.sign_changes, run.counters.events);
  EXPECT_EQ(std::abs(run.particle.w), std::pow(2.0, static_cast<double>(run.counters.events)));
}

TEST(CisStep, RejectsNonPositiveRate) {
  RngStream rng{1};
  EXPECT_THROW(run_cis_scale(scalar(0.0), zero_rho(), constant_event_rate(0.0), 1.0, rng), ctmc::ConfigError);
  EXPECT_THROW(run_cis_scale(scalar(0.0), zero_rho(), constant_event_rate(-2.0), 1.0, rng), ctmc::ConfigError);
}

TEST(CisStep, FrozenWeightAtHorizon) {
  RngStream rng{2};
  CisParticle p{scalar(0.0), 1.0, 0.0, 0.0};
  p = propagate(p, BrownianProposal{}, zero_rho(), constant_event_rate(1e-9), 1.0, rng);
  EXPECT_EQ(p.t, 1.0);
  EXPECT_DOUBLE_EQ(p.s, 1.0);
  EXPECT_EQ(p.w, 1.0);
}

TEST(CisStep, ExactRhoAccessCount) {
  const auto& f = mixture150();
  RngStream rng{13};
  const auto run = run_cis_scale(scalar(f.mode), exact_scale_rho(f.target), constant_event_rate(75.0), 0.2, rng);
  EXPECT_EQ(run.counters.data_accesses, f.target.factor_count() * (run.counters.events + 1));
  const auto sub = run_cis_scale(scalar(f.mode), subsample_scale_rho(f.target), constant_event_rate(75.0), 0.2, rng);
  EXPECT_EQ(sub.counters.data_accesses, 2 * (sub.counters.events + 1));
}

TEST(Resample, DirectFormula) {
  ParticleSystem system;
  system.particles = {{scalar(0.0), 2.0}, {scalar(1.0), -1.0}, {scalar(2.0), 1.0}};
  RngStream rng{17};
  std::array<int, 3> counts{};
  const int draws = 20000;
  for (int r = 0; r < draws; ++r) {
    const auto out = resample(system, rng);
    ASSERT_EQ(out.size(), 3u);
    for (const auto& p : out.particles) {
      const auto k = static_cast<std::size_t>(p.y[0]);
      EXPECT_DOUBLE_EQ(std::abs(p.w), 4.0 / 3.0);
      EXPECT_EQ(std::signbit(p.w), std::signbit(system.particles[k].w));
      ++counts[k];
    }
  }
  const double total = 3.0 * draws;
  EXPECT_NEAR(counts[0] / total, 0.5, 0.01);
  EXPECT_NEAR(counts[1] / total, 0.25, 0.01);
  EXPECT_NEAR(counts[2] / total, 0.25, 0.01);
}

TEST(Resample, EqualWeightsUnchanged) {
  ParticleSystem system;
  for (int i = 0; i < 6; ++i) system.particles.push_back({scalar(i), 0.7});
  RngStream rng{18};
  const auto out = resample(system, rng);
  for (const auto& p : out.particles) EXPECT_DOUBLE_EQ(p.w, 0.7);
}

TEST(Resample, PreservesWeightedSumAndMeanAbsWeight) {
  ParticleSystem system;
  const std::array<double, 5> w{2.0, -1.0, 1.0, 0.5, 3.0};
  for (int i = 0; i < 5; ++i) system.particles.push_back({scalar(i + 1.0), w[static_cast<std::size_t>(i)]});
  double target = 0.0;
  double mean_abs = 0.0;
  for (const auto& p : system.particles) {
    target += p.w * p.y[0];
    mean_abs += std::abs(p.w) / 5.0;
  }
  RngStream rng{19};
  double sum = 0.0;
  const int replicates = 10000;
  for (int r = 0; r < replicates; ++r) {
    const auto out = resample(system, rng);
    double abs_total = 0.0;
    for (const auto& p : out.particles) {
      sum += p.w * p.y[0];
      abs_total += std::abs(p.w);
    }
    EXPECT_NEAR(abs_total / 5.0, mean_abs, 1e-12);
  }
  EXPECT_LT(std::abs(sum / replicates - target) / std::abs(target), 0.01);
}

TEST(Resample, DegenerateSystemThrows) {
  ParticleSystem system;
  system.particles = {{scalar(0.0), 0.0}, {scalar(1.0), 0.0}};
  RngStream rng{20};
  EXPECT_THROW(resample(system, rng), ctmc::DegenerateSystemError);
}

TEST(SignedEss, Examples) {
  EXPECT_DOUBLE_EQ(signed_ess({1.0, 1.0, 1.0, 1.0}), 4.0);
  EXPECT_DOUBLE_EQ(signed_ess({1.0, -1.0}), 2.0);
  EXPECT_DOUBLE_EQ(signed_ess({3.0, 0.0, 0.0}), 1.0);
  EXPECT_DOUBLE_EQ(signed_ess({0.0, 0.0}), 0.0);
  EXPECT_DOUBLE_EQ(signed_ess({1e200, -1e200}), 2.0);
}

TEST(Smc, GaussianPosteriorMean) {
  // Rate 50 keeps 1 + rho / rate positive over the region the particles visit.
  const auto target = GaussianTarget::from_moments(scalar(1.0), ctmc::Matrix::Constant(1, 1, 1.0));
  const SmcConfig config{100, 1.0, 20, 50.0};
  std::vector<double> estimates;
  for (std::uint64_t r = 0; r < 12; ++r) {
    RngStream rng{300 + r};
    const auto result = run_smc(
        config, [](RngStream& g) { return scalar(1.0 + g.normal()); }, BrownianProposal{}, exact_scale_rho(target),
        constant_event_rate(50.0), rng);
    double num = 0.0, den = 0.0;
    for (const auto& snap : result.snapshots) {
      if (snap.t < 5.0) continue;
      double sw = 0.0, swx = 0.0;
      for (std::size_t i = 0; i < snap.w.size(); ++i) {
        sw += snap.w[i];
        swx += snap.w[i] * snap.x[i][0];
      }
      num += swx / sw;
      den += 1.0;
      EXPECT_LE(snap.ess, static_cast<double>(config.particles) + 1e-9);
    }
    estimates.push_back(num / den);
  }
  const double se = std::sqrt(ctmc::testing::variance(estimates) / static_cast<double>(estimates.size()));
  EXPECT_NEAR(ctmc::testing::mean(estimates), 1.0, 3.0 * se + 1e-3);
}

TEST(Smc, ResamplingKeepsMeanAbsWeight) {
  const auto& f = mixture150();
  const SmcConfig config{50, 1.0, 10, 49.0};
  RngStream rng{21};
  const auto result = run_smc(
      config, [](RngStream& g) { return scalar(2.0 * g.normal()); }, BrownianProposal{}, exact_scale_rho(f.target),
      constant_event_rate(12.0), rng);
  EXPECT_GT(result.resamplings, 0u);
  for (std::size_t k = 1; k < result.snapshots.size(); ++k) {
    const auto& snap = result.snapshots[k];
    EXPECT_LE(snap.ess, 50.0 + 1e-9);
    if (!snap.resampled || k + 1 == result.snapshots.size()) continue;
    double before = 0.0;
    for (double w : snap.w) before += std::abs(w);
    EXPECT_GT(before, 0.0);
  }
  const auto final_w = result.final_system.weights();
  if (result.snapshots.back().resampled) {
    double before = 0.0, after = 0.0;
    for (double w : result.snapshots.back().w) before += std::abs(w);
    for (double w : final_w) after += std::abs(w);
    EXPECT_NEAR(after, before, 1e-9 * before);
  }
}

TEST(Smc, DeterministicAndSnapshotsSerialize) {
  const auto& f = mixture150();
  const SmcConfig config{20, 0.5, 4, 10.0};
  const auto run = [&] {
    RngStream rng{22};
    return run_smc(
        config, [](RngStream& g) { return scalar(2.0 * g.normal()); }, BrownianProposal{},
        exact_scale_rho(f.target), constant_event_rate(12.0), rng);
  };
  std::ostringstream a, b;
  write_snapshots_jsonl(a, run().snapshots);
  write_snapshots_jsonl(b, run().snapshots);
  const std::string text = a.str();
  EXPECT_EQ(text, b.str());
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 5);
  EXPECT_NE(text.find("\"t\":0.5"), std::string::npos);
}

TEST(Smc, RejectsBadConfig) {
  const auto target = GaussianTarget::standard(1);
  RngStream rng{1};
  const auto init = [](RngStream&) { return scalar(0.0); };
  EXPECT_THROW(run_smc({1, 1.0, 2, 1.0}, init, BrownianProposal{}, zero_rho(), constant_event_rate(1.0), rng),
               ctmc::ConfigError);
  EXPECT_THROW(run_smc({4, 0.0, 2, 1.0}, init, BrownianProposal{}, zero_rho(), constant_event_rate(1.0), rng),
               ctmc::ConfigError);
}

TEST(VarianceStudy, SmallRunShapeAndBookkeeping) {
  VarianceStudyConfig config;
  config.ns = {50, 200};
  config.xhat_offsets = {0.0, 1.0};
  config.replicates = 200;
  RngStream rng{23};
  const auto rows = variance_study(config, rng);
  ASSERT_EQ(rows.size(), 6u);
  for (const auto& r : rows) {
    EXPECT_EQ(r.replicates, 200u);
    EXPECT_TRUE(std::isfinite(r.var_Wh));
    EXPECT_GE(r.var_Wh, 0.0);
    if (r.policy == "none") {
      // n per event plus n for the starting value; about 1/2 event per run at rate n/2 over 1/n.
      EXPECT_GE(r.data_accesses, static_cast<double>(r.n));
      EXPECT_NEAR(r.data_accesses / static_cast<double>(r.n), 1.5, 0.2);
    } else {
      EXPECT_GE(r.data_accesses, 2.0);
    }
  }
  std::ostringstream os;
  write_variance_csv(os, rows);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "n,policy,xhat_offset,var_Wh,data_accesses,replicates");
}

}  // namespace

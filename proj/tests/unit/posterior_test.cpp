// Copyright 2026 The bpeal Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "bpeal/posterior.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>
#include <vector>

#include "bpeal/error.hpp"

namespace bpeal {
namespace {

constexpr double kPi = std::numbers::pi;

Posterior gaussian_posterior(std::size_t size, double mean, double s) {
  PhaseGrid grid(size);
  std::vector<double> w(size);
  for (std::size_t i = 0; i < size; ++i) {
    const double d = grid.node(i) - mean;
    w[i] = std::exp(-0.5 * d * d / (s * s));
  }
  return Posterior::from_unnormalized(grid, std::move(w));
}

Posterior delta_posterior(std::size_t size, std::size_t at) {
  std::vector<double> w(size, 0.0);
  w[at] = 1.0;
  return Posterior::from_unnormalized(PhaseGrid(size), std::move(w));
}

TEST(Prior, Uniform) {
  const auto p = uniform_prior(PhaseGrid(8));
  for (double w : p.weights()) EXPECT_NEAR(w, 1.0 / (2 * kPi), 1e-15);
  EXPECT_NEAR(p.integral(), 1.0, 1e-15);
  // Nodes start at 0, so the discrete mean sits half a cell below pi and
  // the discrete variance is (G^2 - 1) spacing^2 / 12.
  for (std::size_t size : {8u, 1000u, 100000u}) {
    const auto u = uniform_prior(PhaseGrid(size));
    const double g = static_cast<double>(size);
    EXPECT_NEAR(estimate_mean(u), kPi - kPi / g, 1e-10);
    EXPECT_NEAR(estimate_uncertainty(u), kPi / std::sqrt(3.0) * std::sqrt(1 - 1 / (g * g)), 1e-10);
    EXPECT_NEAR(estimate_mean(u), kPi, u.grid().spacing());
  }
  EXPECT_NEAR(estimate_uncertainty(uniform_prior(PhaseGrid(100000))), 1.8138, 1e-4);
}

TEST(Prior, RejectsTinyGridAndBadWeights) {
  EXPECT_THROW(PhaseGrid(4), std::invalid_argument);
  EXPECT_THROW(Posterior::from_unnormalized(PhaseGrid(8), std::vector<double>(8, 0.0)), NumericError);
  EXPECT_THROW(Posterior::from_unnormalized(PhaseGrid(8), std::vector<double>(7, 1.0)), std::invalid_argument);
  std::vector<double> negative(8, 1.0);
  negative[3] = -1.0;
  EXPECT_THROW(Posterior::from_unnormalized(PhaseGrid(8), negative), std::invalid_argument);
}

TEST(Update, SingleOutcomeShape) {
  PhaseGrid grid(64);
  const auto p = bayes_update(uniform_prior(grid), Outcome::kZero, 0.0);
  // Normalized 1 + cos(phi) integrates to 2 pi.
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_NEAR(p.weights()[i], (1 + std::cos(grid.node(i))) / (2 * kPi), 1e-14);
  }
}

TEST(Update, OppositeOutcomesGiveSineSquared) {
  PhaseGrid grid(256);
  const double aux = 0.7;
  auto p = bayes_update(bayes_update(uniform_prior(grid), Outcome::kZero, aux), Outcome::kOne, aux);
  // sin^2(phi - Phi) / 4 integrates to pi / 4.
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double s = std::sin(grid.node(i) - aux);
    EXPECT_NEAR(p.weights()[i], s * s / 4 / (kPi / 4), 1e-13);
  }
}

TEST(Update, BruteForceOracleOnTinyGrid) {
  PhaseGrid grid(8);
  const double phases[] = {0.0, 0.9, 2.3, 4.1, 5.9};
  for (int a = 0; a < 5; ++a) {
    for (int b = 0; b < 5; ++b) {
      for (int c = 0; c < 5; ++c) {
        for (int bits = 0; bits < 8; ++bits) {
          const Outcome u[3] = {Outcome(bits & 1), Outcome((bits >> 1) & 1), Outcome((bits >> 2) & 1)};
          const double aux[3] = {phases[a], phases[b], phases[c]};
          auto p = uniform_prior(grid);
          for (int j = 0; j < 3; ++j) p.update(u[j], aux[j]);
          std::vector<double> oracle(8);
          double total = 0.0;
          for (std::size_t i = 0; i < 8; ++i) {
            const double phi = 2 * kPi * static_cast<double>(i) / 8;
            double prod = 1.0;
            for (int j = 0; j < 3; ++j) {
              prod *= 0.5 * (1 + (to_int(u[j]) ? -1.0 : 1.0) * std::cos(phi - aux[j]));
            }
            oracle[i] = prod;
            total += prod;
          }
          if (total < 1e-12) continue;
          for (std::size_t i = 0; i < 8; ++i) {
            EXPECT_NEAR(p.weights()[i], oracle[i] / (total * 2 * kPi / 8), 1e-12);
          }
        }
      }
    }
  }
}

TEST(Update, NormalizedAfterEveryStep) {
  PhaseGrid grid(4096);
  NodeTrig trig(grid);
  Rng rng(3);
  std::uniform_real_distribution<double> phase(0.0, 2 * kPi);
  auto p = uniform_prior(grid);
  for (int n = 1; n <= 2000; ++n) {
    const double aux = phase(rng);
    const Outcome u = likelihood(Outcome::kOne, 2.7624, aux) > 0.5 ? Outcome::kOne : Outcome::kZero;
    if (n % 2) {
      p.update(u, aux);
    } else {
      p.update(u, aux, trig);
    }
    ASSERT_NEAR(p.integral(), 1.0, 1e-9) << n;
    for (double w : p.weights()) ASSERT_GE(w, 0.0);
  }
}

TEST(Update, OrderCommutes) {
  PhaseGrid grid(1000);
  const auto prior = bayes_update(uniform_prior(grid), Outcome::kOne, 1.1);
  const auto ab = bayes_update(bayes_update(prior, Outcome::kZero, 0.3), Outcome::kOne, 4.4);
  const auto ba = bayes_update(bayes_update(prior, Outcome::kOne, 4.4), Outcome::kZero, 0.3);
  for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_NEAR(ab.weights()[i], ba.weights()[i], 1e-12);
}

TEST(Update, TrigFormMatchesDirect) {
  PhaseGrid grid(999);
  NodeTrig trig(grid);
  auto a = uniform_prior(grid);
  auto b = uniform_prior(grid);
  for (int n = 0; n < 50; ++n) {
    const double aux = 0.37 * n;
    const Outcome u = Outcome(n % 3 == 0);
    a.update(u, aux);
    b.update(u, aux, trig);
  }
  for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_NEAR(a.weights()[i], b.weights()[i], 1e-10);
}

TEST(Update, GridRefinementMovesEstimateLittle) {
  std::vector<std::pair<Outcome, double>> sequence;
  Rng rng(8);
  for (int n = 1; n <= 400; ++n) {
    const double aux = 2 * kPi * n / 40;
    std::bernoulli_distribution coin(likelihood(Outcome::kOne, 2.7624, aux));
    sequence.emplace_back(coin(rng) ? Outcome::kOne : Outcome::kZero, aux);
  }
  auto coarse = uniform_prior(PhaseGrid(5000));
  auto fine = uniform_prior(PhaseGrid(10000));
  for (const auto& [u, aux] : sequence) {
    coarse.update(u, aux);
    fine.update(u, aux);
  }
  EXPECT_LT(std::abs(estimate_mean(coarse) - estimate_mean(fine)), 2 * coarse.grid().spacing());
}

TEST(Estimate, DeltaAndGaussian) {
  const auto delta = delta_posterior(1000, 417);
  EXPECT_NEAR(estimate_mean(delta), delta.grid().node(417), 1e-12);
  EXPECT_LE(estimate_uncertainty(delta), delta.grid().spacing());
  const auto g = gaussian_posterior(100000, 2.7624, 0.1);
  const double dphi = g.grid().spacing();
  EXPECT_NEAR(estimate_mean(g), 2.7624, dphi);
  EXPECT_NEAR(estimate_uncertainty(g), 0.1, 2 * dphi);
  EXPECT_NEAR(estimate_mean(g, MomentMode::kCircular), 2.7624, dphi);
  // sqrt(-2 ln exp(-s^2/2)) = s for a wrapped normal.
  EXPECT_NEAR(estimate_uncertainty(g, MomentMode::kCircular), 0.1, 2 * dphi);
}

TEST(Estimate, CircularHandlesSeam) {
  PhaseGrid grid(20000);
  std::vector<double> w(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double d = wrapped_distance(grid.node(i), 0.02);
    w[i] = std::exp(-0.5 * d * d / 0.01);
  }
  const auto p = Posterior::from_unnormalized(grid, w);
  EXPECT_LT(wrapped_distance(estimate_mean(p, MomentMode::kCircular), 0.02), 1e-3);
  EXPECT_GT(wrapped_distance(estimate_mean(p, MomentMode::kLinear), 0.02), 1.0);
}

TEST(Ghosh, GaussianIdentity) {
  for (double s : {0.05, 0.1, 0.5}) {
    const auto p = gaussian_posterior(100000, kPi, s);
    const auto bound = ghosh_bound(p);
    EXPECT_NEAR(bound.value / (s * s), 1.0, 0.01) << s;
    EXPECT_FALSE(bound.resolution_limited);
    EXPECT_NEAR(ghosh_bound_gaussian(p), s * s, 0.01 * s * s);
  }
}

TEST(Ghosh, UniformIsUndefined) {
  EXPECT_THROW(ghosh_bound(uniform_prior(PhaseGrid(1000))), NumericError);
}

TEST(Ghosh, SingleUpdateMatchesDenseQuadrature) {
  const auto p = bayes_update(uniform_prior(PhaseGrid(100000)), Outcome::kZero, 0.0);
  // Independent oracle: p = (1 + cos)/(2 pi), p' = -sin/(2 pi); integrate
  // p'^2 / p with a dense composite Simpson rule, skipping the zero at pi.
  constexpr int kIntervals = 2'000'000;
  const double h = 2 * kPi / kIntervals;
  double info = 0.0;
  for (int i = 0; i <= kIntervals; ++i) {
    const double phi = i * h;
    const double dens = (1 + std::cos(phi)) / (2 * kPi);
    const double deriv = -std::sin(phi) / (2 * kPi);
    const double f = dens > 1e-300 ? deriv * deriv / dens : 0.0;
    const double weight = (i == 0 || i == kIntervals) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    info += weight * f;
  }
  info *= h / 3;
  EXPECT_NEAR(ghosh_bound(p).value * info, 1.0, 0.005);
}

TEST(Ghosh, ResolutionFlag) {
  EXPECT_TRUE(resolution_limited(delta_posterior(1000, 10)));
  EXPECT_TRUE(ghosh_bound(gaussian_posterior(1000, 3.0, 0.01)).resolution_limited);
  EXPECT_FALSE(resolution_limited(gaussian_posterior(1000, 3.0, 0.2)));
}

TEST(Ghosh, VarianceDominatesBoundAlongUpdates) {
  PhaseGrid grid(20000);
  auto p = uniform_prior(grid);
  Rng rng(21);
  for (int n = 1; n <= 3000; ++n) {
    const double aux = 2 * kPi * n / 40;
    std::bernoulli_distribution coin(likelihood(Outcome::kOne, 2.7624, aux));
    p.update(coin(rng) ? Outcome::kOne : Outcome::kZero, aux);
    if ((n & (n - 1)) != 0 && n % 250 != 0) continue;
    const auto bound = ghosh_bound(p);
    if (bound.resolution_limited) continue;
    const double sd = estimate_uncertainty(p);
    EXPECT_GE(sd * sd, bound.value * 0.95) << n;
  }
}

TEST(WrappedDistance, Basics) {
  EXPECT_NEAR(wrapped_distance(0.1, 2 * kPi - 0.1), 0.2, 1e-12);
  EXPECT_NEAR(wrapped_distance(1.0, 1.0 + kPi), kPi, 1e-12);
  EXPECT_NEAR(wrapped_distance(3.0, 2.5), 0.5, 1e-12);
}

TEST(Csv, RoundTrip) {
  auto p = bayes_update(gaussian_posterior(1000, 1.0, 0.3), Outcome::kOne, 0.2);
  std::stringstream buffer;
  write_posterior_csv(p, buffer);
  const auto back = read_posterior_csv(buffer);
  ASSERT_EQ(back.grid(), p.grid());
  for (std::size_t i = 0; i < 1000; ++i) EXPECT_EQ(back.weights()[i], p.weights()[i]);
  std::stringstream bad("phi,weight\n0,1\nx,2\n");
  EXPECT_ANY_THROW(read_posterior_csv(bad));
}

TEST(Scheduled, EqualsSequentialUpdates) {
  PhaseGrid grid(3000);
  for (std::size_t budget : {ScheduleLikelihood::kDefaultTableBudget, std::size_t{0}}) {
    auto rows = std::make_shared<const ScheduleLikelihood>(grid, 40, budget);
    EXPECT_EQ(rows->tabulated(), budget != 0);
    ScheduledPosterior scheduled(rows);
    auto sequential = uniform_prior(grid);
    Rng rng(5);
    for (int n = 1; n <= 5000; ++n) {
      const int index = (n - 1) % 40 + 1;
      const double aux = rows->aux_phase(index);
      EXPECT_NEAR(aux, 2 * kPi * index / 40, 1e-15);
      std::bernoulli_distribution coin(likelihood(Outcome::kOne, 2.7624, aux) * 0.9 + 0.05);
      const Outcome u = coin(rng) ? Outcome::kOne : Outcome::kZero;
      scheduled.add(index, u);
      sequential.update(u, aux);
      if (n == 1 || n == 77 || n == 5000) {
        const auto m = scheduled.materialize();
        double worst = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
          worst = std::max(worst, std::abs(m.weights()[i] - sequential.weights()[i]));
        }
        EXPECT_LT(worst, 1e-9 * *std::max_element(m.weights().begin(), m.weights().end())) << n;
        EXPECT_EQ(scheduled.updates(), n);
      }
    }
  }
}

}  // namespace
}  // namespace bpeal

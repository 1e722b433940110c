// Copyright 2026 The npgame Authors
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


#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "npgame/passive.hpp"
#include "support/oracles.hpp"

namespace npgame {
namespace {

using testing::bernoulli;

double rejected_mass(const PassiveEquilibrium& eq) {
  double s = 0.0;
  for (std::size_t m : eq.regions.m1()) s += eq.sigma1_star.probability(m);
  return s;
}

TEST(Passive, BernoulliTilt) {
  const auto s = bernoulli(0.3, 0.7);
  const auto eq = passive_equilibrium(s.f0, s.f1, 0.3, Penalty(0.75));
  const double d = 0.3 + 0.7 * std::exp(-1.0 / 0.75);
  EXPECT_NEAR(eq.sigma1_star[1], 0.7 * std::exp(-1.0 / 0.75) / d, 1e-15);
  EXPECT_NEAR(eq.sigma1_star[1], 0.380828, 1e-6);
  EXPECT_NEAR(eq.normalizer, d, 1e-15);
  EXPECT_EQ(eq.sigma0_star.masses(), s.f0.masses());
  EXPECT_NEAR(eq.p_f, 0.3, 1e-15);
  EXPECT_NEAR(eq.p_d, eq.sigma1_star[1], 1e-15);
}

// Gibbs variational principle: min_q q(M1) + lambda KL(q || f1) equals
// -lambda ln sum f1 e^{-1[M1]/lambda}.
TEST(Passive, AttainsTheGibbsMinimum) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    const auto s = testing::random_scenario(rng, 2 + trial % 6);
    const double alpha = testing::uniform(rng, 0.01, 1.0);
    const double lam = testing::log_uniform(rng, 0.05, 20.0);
    const auto eq = passive_equilibrium(s.f0, s.f1, alpha, Penalty(lam));
    const NpTest t = np_rule(s.f0, s.f1, alpha);
    double z = 0.0;
    for (std::size_t m = 0; m < s.f1.size(); ++m) {
      const bool strict = t.rule.accept_prob[m] == 1.0;
      z += s.f1.probability(m) * (strict ? std::exp(-1.0 / lam) : 1.0);
    }
    const double value = rejected_mass(eq) + lam * kl_divergence(eq.sigma1_star, s.f1);
    EXPECT_NEAR(value, -lam * std::log(z), 1e-12);
  }
}

TEST(Passive, OneDimensionalGridFindsNothingBetter) {
  const auto s = bernoulli(0.3, 0.7);
  for (double lam : {0.3, 0.75, 2.0}) {
    const auto eq = passive_equilibrium(s.f0, s.f1, 0.3, Penalty(lam));
    const double value = rejected_mass(eq) + lam * kl_divergence(eq.sigma1_star, s.f1);
    double best = 1e300;
    for (int i = 0; i <= 100000; ++i) {
      const double b = i / 100000.0;
      best = std::min(best, b + lam * testing::kl({1.0 - b, b}, {0.3, 0.7}));
    }
    EXPECT_LE(value, best + 1e-12);
    EXPECT_GE(value, best - 1e-6);
  }
}

TEST(Passive, FreeLyingEvadesCompletely) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = testing::random_scenario(rng, 2 + trial % 5);
    const double alpha = testing::uniform(rng, 0.01, 0.95);
    const auto eq = passive_equilibrium(s.f0, s.f1, alpha, Penalty(0.0));
    if (np_rule(s.f0, s.f1, alpha).regions.m_star().empty()) {
      EXPECT_EQ(eq.p_d, 0.0);
    }
    EXPECT_EQ(rejected_mass(eq), 0.0);
  }
  const auto b = bernoulli(0.3, 0.7);
  EXPECT_EQ(passive_equilibrium(b.f0, b.f1, 0.3, Penalty(0.0)).p_d, 0.0);
}

TEST(Passive, InfinitePenaltyReproducesNominalRates) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = testing::random_scenario(rng, 2 + trial % 5);
    const double alpha = testing::uniform(rng, 0.01, 1.0);
    const auto eq = passive_equilibrium(s.f0, s.f1, alpha, Penalty::infinite());
    const Rates r = rates(np_rule(s.f0, s.f1, alpha).rule, s.f0, s.f1);
    EXPECT_NEAR(eq.p_f, r.p_f, 1e-12);
    EXPECT_NEAR(eq.p_d, r.p_d, 1e-12);
  }
}

TEST(Passive, DetectionDecreasesAsLyingGetsCheaper) {
  const auto s = bernoulli(0.3, 0.7);
  double previous = 0.0;
  for (double lam : {0.05, 0.1, 0.3, 0.75, 2.0, 10.0, 100.0}) {
    const double pd = passive_equilibrium(s.f0, s.f1, 0.3, Penalty(lam)).p_d;
    EXPECT_GT(pd, previous);
    EXPECT_LE(pd, 0.7);
    previous = pd;
  }
}

TEST(Passive, ErocNeverAboveNominal) {
  std::mt19937_64 rng(24);
  std::vector<double> grid;
  for (int i = 1; i <= 20; ++i) grid.push_back(i / 20.0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = testing::random_scenario(rng, 2 + trial % 5);
    const auto pas = passive_eroc(s.f0, s.f1, Penalty(0.5), grid);
    const auto nom = roc_curve(s.f0, s.f1, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      EXPECT_LE(pas[i].p_d, nom[i].p_d + 1e-12);
      EXPECT_NEAR(pas[i].p_f, nom[i].p_f, 1e-12);
    }
  }
}

}  // namespace
}  // namespace npgame

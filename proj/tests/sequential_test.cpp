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


#include <chrono>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "npgame/sequential.hpp"
#include "support/oracles.hpp"

namespace npgame {
namespace {

using testing::bernoulli;

TEST(NonadversarialSequential, MatchesBinomialTails) {
  const auto s = bernoulli(0.3, 0.7);
  for (double beta : {0.9, 1.0, 2.5}) {
    for (double r : {0.0, 0.5}) {
      const auto rows = nonadversarial_sequential_rates(s.f0, s.f1,
                                                        RatioThreshold{beta, r}, 15);
      ASSERT_EQ(rows.size(), 15u);
      for (int j = 1; j <= 15; ++j) {
        const auto [pf, pd] = testing::bernoulli_product_test(0.3, 0.7, beta, r, j);
        EXPECT_NEAR(rows[j - 1].p_f, pf, 1e-12) << "beta=" << beta << " j=" << j;
        EXPECT_NEAR(rows[j - 1].p_d, pd, 1e-12);
      }
    }
  }
}

TEST(NonadversarialSequential, SizeFormHasExactSizeAtEveryStage) {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = testing::random_scenario(rng, 2 + trial % 3);
    const double alpha = testing::uniform(rng, 0.01, 0.9);
    for (const Rates& r : nonadversarial_sequential_rates(s.f0, s.f1, alpha, 6)) {
      EXPECT_NEAR(r.p_f, alpha, 1e-9);
    }
  }
}

TEST(PassiveSequential, MatchesBinomialTailsOfTheTiltedStrategy) {
  const auto s = bernoulli(0.3, 0.7);
  const double lam = 0.75;
  const double tilt = 0.7 * std::exp(-1.0 / lam);
  const double theta1_bar = tilt / (0.3 + tilt);
  const auto rows =
      passive_sequential_rates(s.f0, s.f1, RatioThreshold{0.9, 0.0}, Penalty(lam), 15);
  const auto nominal =
      nonadversarial_sequential_rates(s.f0, s.f1, RatioThreshold{0.9, 0.0}, 15);
  for (int j = 1; j <= 15; ++j) {
    // Same test, H1 traffic drawn from the tilted Bernoulli.
    const double l1 = std::log(0.7 / 0.3), l0 = std::log(0.3 / 0.7);
    double pd = 0.0;
    for (int k = 0; k <= j; ++k) {
      if (k * l1 + (j - k) * l0 - std::log(0.9) > 1e-9) {
        pd += testing::binomial(j, k) * std::pow(theta1_bar, k) *
              std::pow(1.0 - theta1_bar, j - k);
      }
    }
    EXPECT_NEAR(rows[j - 1].p_d, pd, 1e-12);
    EXPECT_NEAR(rows[j - 1].p_f, nominal[j - 1].p_f, 1e-12);
    EXPECT_LE(rows[j - 1].p_d, nominal[j - 1].p_d + 1e-9);
  }
}

TEST(ForwardInduction, OneStageIsTheStageGame) {
  std::mt19937_64 rng(52);
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = testing::random_scenario(rng, 2 + trial % 4);
    const double beta = testing::log_uniform(rng, 0.1, 10.0);
    const Penalty lambda(testing::uniform(rng, 0.1, 5.0));
    const auto spec = ThresholdSpec::from_beta(beta);
    const auto tree = forward_induction(s.f0, s.f1, spec, lambda, 1);
    const auto p = proactive_equilibrium(s.f0, s.f1, spec, lambda);
    ASSERT_EQ(tree.size(), 1u);
    const auto& stage = *tree.root().stage;
    EXPECT_EQ(stage.sigma0_star.masses(), p.sigma0_star.masses());
    EXPECT_EQ(stage.sigma1_star.masses(), p.sigma1_star.masses());
    EXPECT_EQ(stage.rule, p.rule);
    EXPECT_EQ(stage.regions, p.regions);
    EXPECT_EQ(std::isnan(stage.zeta) ? 0.0 : stage.zeta, std::isnan(p.zeta) ? 0.0 : p.zeta);
    const Rates r = sequential_rates(tree, 1);
    EXPECT_EQ(r.p_f, p.p_f_defacto);
    EXPECT_EQ(r.p_d, p.p_d_defacto);
  }
}

class TreeInvariants : public ::testing::TestWithParam<int> {};

TEST_P(TreeInvariants, BeliefsPathMassesAndThresholds) {
  std::mt19937_64 rng(53 + GetParam());
  const auto s = testing::random_scenario(rng, 2 + GetParam() % 2);
  const double beta = testing::log_uniform(rng, 0.3, 3.0);
  const double prior0 = testing::uniform(rng, 0.2, 0.8);
  const Penalty lambda(testing::uniform(rng, 0.3, 3.0));
  const auto spec = ThresholdSpec::from_beta(beta, prior0);
  const std::size_t stages = 6;
  const auto tree = forward_induction(s.f0, s.f1, spec, lambda, stages);

  const double invariant = beta * (1.0 - prior0) / prior0;
  for (std::size_t j = 1; j <= stages; ++j) {
    const auto [begin, end] = tree.level(j);
    double mass0 = 0.0, mass1 = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      const HistoryNode& node = tree.node(i);
      mass0 += node.path_mass0;
      mass1 += node.path_mass1;

      // Product form of the posterior along the path.
      double odds = (1.0 - prior0) / prior0;
      std::size_t k = i;
      while (k != 0) {
        const HistoryNode& child = tree.node(k);
        const HistoryNode& parent = tree.node(child.parent);
        odds *= parent.stage_sigma1()[child.message] / parent.stage_sigma0()[child.message];
        k = child.parent;
      }
      EXPECT_NEAR(node.belief.h1, odds / (1.0 + odds), 1e-9);
      EXPECT_NEAR(node.beta_j * node.belief.h1 / node.belief.h0, invariant,
                  1e-9 * invariant);

      // The belief is a martingale under the predictive distribution.
      if (!tree.is_leaf(i)) {
        double expected = 0.0;
        for (std::size_t c = 0; c < tree.branching(); ++c) {
          const HistoryNode& child = tree.node(node.first_child + c);
          const double pred = node.belief.h0 * node.stage_sigma0().probability(child.message) +
                              node.belief.h1 * node.stage_sigma1().probability(child.message);
          expected += pred * child.belief.h1;
        }
        EXPECT_NEAR(expected, node.belief.h1, 1e-12);
      }
    }
    EXPECT_NEAR(mass0, 1.0, 1e-12);
    EXPECT_NEAR(mass1, 1.0, 1e-12);
  }
  EXPECT_EQ(tree.message_path(tree.size() - 1).size(), stages - 1);
}

INSTANTIATE_TEST_SUITE_P(Random, TreeInvariants, ::testing::Range(0, 8));

TEST(ForwardInduction, FifteenBernoulliStagesWithinBudget) {
  const auto s = bernoulli(0.3, 0.7);
  const auto t0 = std::chrono::steady_clock::now();
  const auto tree =
      forward_induction(s.f0, s.f1, ThresholdSpec::from_beta(0.9), Penalty(0.75), 15);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_EQ(tree.size(), (std::size_t{1} << 15) - 1);
  EXPECT_EQ(tree.level(15).second - tree.level(15).first, std::size_t{1} << 14);
  EXPECT_LT(secs, 5.0);
}

TEST(ForwardInduction, RefusesOversizedTrees) {
  const auto s = bernoulli(0.3, 0.7);
  SequentialOptions opt;
  opt.enumeration_cap = 1000;
  try {
    forward_induction(s.f0, s.f1, ThresholdSpec::from_beta(0.9), Penalty(0.75), 11, opt);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kCapExceeded);
  }
  try {
    nonadversarial_sequential_rates(s.f0, s.f1, RatioThreshold{}, 30);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kCapExceeded);
  }
}

TEST(ForwardInduction, NeedsAPositivePenalty) {
  const auto s = bernoulli(0.3, 0.7);
  try {
    forward_induction(s.f0, s.f1, ThresholdSpec::from_beta(0.9), Penalty(0.0), 3);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInvalidArgument);
  }
}

TEST(ForwardInduction, ErrorsNameTheHistory) {
  const auto s = bernoulli(0.3, 0.7);
  SequentialOptions opt;
  opt.proactive.selection = RegionSelection::kKktThreshold;
  try {
    forward_induction(s.f0, s.f1, ThresholdSpec::from_beta(0.9), Penalty(0.75), 3, opt);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNoRoot);
    EXPECT_NE(std::string(e.what()).find("history []"), std::string::npos) << e.what();
  }
}

}  // namespace
}  // namespace npgame

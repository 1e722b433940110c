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

#pragma once

#include <cstddef>
#include <vector>

#include "npgame/neyman_pearson.hpp"
#include "npgame/penalty.hpp"
#include "npgame/pmf.hpp"

namespace npgame {

// Stackelberg play against a detector that runs a fixed test on the nominal
// densities. The attacker leaves H0 traffic alone and tilts H1 traffic away
// from the strict rejection set by e^{-1/lambda}.
struct PassiveEquilibrium {
  Pmf sigma0_star;
  Pmf sigma1_star;
  DecisionRule rule;
  RegionPartition regions;
  Penalty lambda;
  double normalizer = 1.0;  // D: total tilted H1 mass before normalization
  double p_f = 0.0;
  double p_d = 0.0;
};

// Attacker's best response to a given nominal test. Randomized ties (M*) sit
// on the acceptance side of the tilt.
inline PassiveEquilibrium passive_response(const Pmf& f0, const Pmf& f1,
                                           const NpTest& test,
                                           Penalty lambda) {
  require_common_support(f0, f1);
  const double discount = lambda.rejection_discount();

  std::vector<double> tilted(f1.size(), 0.0);
  double total = 0.0;
  for (std::size_t m = 0; m < f1.size(); ++m) {
    const bool rejected = test.regions.at(m) == Region::kRejection;
    tilted[m] = rejected ? f1[m] * discount : f1[m];
    total += tilted[m] * f1.space().weight(m);
  }

  // lambda = 0 with every message strictly rejected: nothing to move away
  // from, every strategy is detected with certainty; keep f1.
  Pmf sigma1 = total > 0.0 ? normalize(tilted, f1.space_ptr()) : f1;
  if (total <= 0.0) total = 1.0;

  const Rates r = rates(test.rule, f0, sigma1);
  return PassiveEquilibrium{f0,     std::move(sigma1), test.rule, test.regions,
                            lambda, total,             r.p_f,     r.p_d};
}

inline PassiveEquilibrium passive_equilibrium(const Pmf& f0, const Pmf& f1,
                                              double alpha, Penalty lambda) {
  return passive_response(f0, f1, np_rule(f0, f1, alpha), lambda);
}

inline std::vector<RocPoint> passive_eroc(const Pmf& f0, const Pmf& f1,
                                          Penalty lambda,
                                          const std::vector<double>& alpha_grid) {
  validate_alpha_grid(alpha_grid);
  std::vector<RocPoint> curve;
  curve.reserve(alpha_grid.size());
  for (double alpha : alpha_grid) {
    const auto eq = passive_equilibrium(f0, f1, alpha, lambda);
    curve.push_back({alpha, eq.p_f, eq.p_d});
  }
  return curve;
}

}  // namespace npgame

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


// Binary-message case study: nominal Bernoulli(0.3) under H0 and
// Bernoulli(0.7) under H1, threshold beta = 0.9.

#include <cstdio>

#include "npgame/npgame.hpp"

namespace {

void show(const char* name, const npgame::Pmf& s0, const npgame::Pmf& s1,
          const npgame::RegionPartition& regions, double pf, double pd) {
  std::printf("%-9s theta0_bar=%.6f theta1_bar=%.6f regions=(%s,%s) pf=%.6f pd=%.6f\n",
              name, s0.probability(1), s1.probability(1),
              std::string(npgame::to_string(regions.at(0))).c_str(),
              std::string(npgame::to_string(regions.at(1))).c_str(), pf, pd);
}

}  // namespace

int main() {
  using namespace npgame;
  const auto space = MessageSpace::indexed(2);
  const Pmf f0(space, {0.7, 0.3});
  const Pmf f1(space, {0.3, 0.7});
  const double beta = 0.9;

  for (double lam : {0.6, 0.75}) {
    const Penalty lambda(lam);
    std::printf("lambda = %.2f\n", lam);
    const auto pas =
        passive_response(f0, f1, lr_threshold_rule(f0, f1, beta), lambda);
    show("passive", pas.sigma0_star, pas.sigma1_star, pas.regions, pas.p_f, pas.p_d);
    const auto pro =
        proactive_equilibrium(f0, f1, ThresholdSpec::from_beta(beta), lambda);
    show("proactive", pro.sigma0_star, pro.sigma1_star, pro.regions,
         pro.p_f_defacto, pro.p_d_defacto);
    std::printf("          zeta=%.8f c0=%.6f c1=%.6f potential=%.8f\n", pro.zeta,
                pro.c0, pro.c1, pro.potential);
  }

  std::printf("\nrepeated observations, lambda = 0.75\n");
  const Penalty lambda(0.75);
  const auto tree =
      forward_induction(f0, f1, ThresholdSpec::from_beta(beta), lambda, 15);
  const auto nominal =
      nonadversarial_sequential_rates(f0, f1, RatioThreshold{beta, 0.0}, 15);
  const auto passive =
      passive_sequential_rates(f0, f1, RatioThreshold{beta, 0.0}, lambda, 15);
  std::printf("stage  pd_nominal pd_passive pd_proactive  pf_nominal pf_proactive\n");
  for (std::size_t j = 1; j <= 15; ++j) {
    const Rates pro = sequential_rates(tree, j);
    std::printf("%5zu  %10.6f %10.6f %12.6f  %10.6f %12.6f\n", j,
                nominal[j - 1].p_d, passive[j - 1].p_d, pro.p_d,
                nominal[j - 1].p_f, pro.p_f);
  }
  return 0;
}

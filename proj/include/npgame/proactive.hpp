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

// Signaling game against a detector that thresholds the distorted
// likelihood ratio sigma1/sigma0 at beta.

#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "npgame/error.hpp"
#include "npgame/neyman_pearson.hpp"
#include "npgame/penalty.hpp"
#include "npgame/pmf.hpp"
#include "npgame/zeta.hpp"

namespace npgame {

// Detector threshold, given directly or through a size and the priors.
class ThresholdSpec {
 public:
  static ThresholdSpec from_beta(double beta, double prior0 = 0.5) {
    if (!(beta > 0.0) || !std::isfinite(beta)) {
      throw Error(ErrorKind::kInvalidArgument,
                  "beta must be positive and finite");
    }
    validate_priors(prior0, 1.0 - prior0);
    return ThresholdSpec(beta, std::nullopt, prior0);
  }

  static ThresholdSpec from_alpha(double alpha, double prior0, double prior1) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
      throw Error(ErrorKind::kInvalidAlpha,
                  "alpha must lie in (0, 1) to define a threshold");
    }
    validate_priors(prior0, prior1);
    return ThresholdSpec((prior0 / prior1) * (1.0 / alpha - 1.0), alpha,
                         prior0);
  }

  double beta() const noexcept { return beta_; }
  std::optional<double> alpha() const noexcept { return alpha_; }
  double prior0() const noexcept { return prior0_; }
  double prior1() const noexcept { return 1.0 - prior0_; }

 private:
  ThresholdSpec(double beta, std::optional<double> alpha, double prior0)
      : beta_(beta), alpha_(alpha), prior0_(prior0) {}

  static void validate_priors(double p0, double p1) {
    if (!(p0 > 0.0 && p1 > 0.0) || std::abs(p0 + p1 - 1.0) > 1e-12) {
      throw Error(ErrorKind::kInvalidPrior,
                  "priors must be positive and sum to one");
    }
  }

  double beta_;
  std::optional<double> alpha_;
  double prior0_;
};

inline double beta_from_spec(const ThresholdSpec& spec) { return spec.beta(); }

struct Posterior {
  double h0 = 0.5;
  double h1 = 0.5;
};

// Bayes update on message m; off-path messages leave the prior unchanged.
inline Posterior posterior(double prior0, double prior1, const Pmf& sigma0,
                           const Pmf& sigma1, std::size_t m) {
  const double a = prior0 * sigma0[m];
  const double b = prior1 * sigma1[m];
  if (a + b <= 0.0) return Posterior{prior0, prior1};
  return Posterior{a / (a + b), b / (a + b)};
}

// How the rejection set M1 is chosen.
enum class RegionSelection {
  // Minimize the game potential over rejection sets, solving the balance
  // equation for each. Exhaustive (hence the global minimum) up to
  // kExhaustiveRejectionLimit live messages, local search beyond.
  kPotentialMinimizing,
  // M1 = {zeta * LR > e^{1/lambda}} with zeta from solve_zeta.
  kKktThreshold,
};

struct ProactiveOptions {
  RegionSelection selection = RegionSelection::kPotentialMinimizing;
  ZetaSearch zeta_search = ZetaSearch::kAssumptionBracket;  // threshold mode
  double r_star = 0.0;  // detector's play on M*
};

struct EquilibriumProfile {
  Pmf sigma0_star;
  Pmf sigma1_star;
  DecisionRule rule = {};
  RegionPartition regions = {};
  double zeta = std::numeric_limits<double>::quiet_NaN();
  double c0 = std::numeric_limits<double>::quiet_NaN();
  double c1 = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> rho0 = {};  // KKT multiplier on M*, zero elsewhere
  Penalty lambda{0.0};
  double beta = 0.0;
  double p_d_defacto = 0.0;
  double p_f_defacto = 0.0;
  double p_d_counterfactual = 0.0;
  double potential = 0.0;
  std::size_t zeta_root_count = 0;
};

struct ProactiveRates {
  double p_f_defacto = 0.0;
  double p_d_defacto = 0.0;
  double p_d_counterfactual = 0.0;
};

inline ProactiveRates proactive_rates(const EquilibriumProfile& profile,
                                      const Pmf& f1) {
  const auto& rule = profile.rule.accept_prob;
  return ProactiveRates{weighted_total(rule, profile.sigma0_star),
                        weighted_total(rule, profile.sigma1_star),
                        weighted_total(rule, f1)};
}

namespace detail {

struct StagePoint {
  Pmf sigma0;
  Pmf sigma1;
  double c0;
  double c1;
};

// Closed-form strategies for a given zeta and region assignment.
inline StagePoint strategies_at(const Pmf& f0, const Pmf& f1, double beta,
                                Penalty lambda, double zeta,
                                const std::vector<Region>& tags) {
  const double discount = lambda.rejection_discount();
  const double a = beta / (1.0 + beta);
  std::vector<double> raw0(f0.size(), 0.0), raw1(f0.size(), 0.0);
  for (std::size_t m = 0; m < f0.size(); ++m) {
    switch (tags[m]) {
      case Region::kAcceptance:
        raw0[m] = f0[m];
        raw1[m] = f1[m];
        break;
      case Region::kRejection:
        raw0[m] = f0[m];
        raw1[m] = f1[m] * discount;
        break;
      case Region::kUncertainty: {
        const double t = zeta * f1[m] / f0[m];
        raw0[m] = f0[m] * std::pow(t, a);
        raw1[m] = f1[m] * std::pow(t, -1.0 / (1.0 + beta));
        break;
      }
      case Region::kDead:
        break;
    }
  }
  double s0 = 0.0, s1 = 0.0;
  for (std::size_t m = 0; m < f0.size(); ++m) {
    s0 += raw0[m] * f0.space().weight(m);
    s1 += raw1[m] * f0.space().weight(m);
  }
  return StagePoint{normalize(raw0, f0.space_ptr()),
                    normalize(raw1, f0.space_ptr()), 1.0 / s0, 1.0 / s1};
}

// Attacker's objective: H1 mass the detector strictly rejects plus the
// lambda-weighted lying cost.
inline double potential_with_rejection(const Pmf& sigma0, const Pmf& sigma1,
                                       const Pmf& f0, const Pmf& f1,
                                       Penalty lambda,
                                       const std::vector<Region>& tags) {
  double rejected = 0.0;
  for (std::size_t m = 0; m < tags.size(); ++m) {
    if (tags[m] == Region::kRejection) rejected += sigma1.probability(m);
  }
  return rejected +
         lambda.value() * (kl_divergence(sigma1, f1) + kl_divergence(sigma0, f0));
}

inline EquilibriumProfile assemble_profile(const Pmf& f0, const Pmf& f1,
                                           double beta, Penalty lambda,
                                           double r_star, double zeta,
                                           std::vector<Region> tags,
                                           StagePoint point) {
  EquilibriumProfile p{std::move(point.sigma0), std::move(point.sigma1)};
  p.zeta = zeta;
  p.c0 = point.c0;
  p.c1 = point.c1;
  p.lambda = lambda;
  p.beta = beta;
  p.rule.tau = beta;
  p.rule.randomization = r_star;
  p.rule.accept_prob.assign(f0.size(), 0.0);
  p.rho0.assign(f0.size(), 0.0);
  for (std::size_t m = 0; m < f0.size(); ++m) {
    if (tags[m] == Region::kRejection) {
      p.rule.accept_prob[m] = 1.0;
    } else if (tags[m] == Region::kUncertainty) {
      p.rule.accept_prob[m] = r_star;
      if (std::isfinite(zeta)) {
        p.rho0[m] = lambda.value() / (1.0 + beta) *
                    (std::log(f1[m] / f0[m]) + std::log(zeta));
      }
    }
  }
  p.regions = RegionPartition(std::move(tags));
  const auto r = proactive_rates(p, f1);
  p.p_f_defacto = r.p_f_defacto;
  p.p_d_defacto = r.p_d_defacto;
  p.p_d_counterfactual = r.p_d_counterfactual;
  if (!lambda.is_zero() && !lambda.is_infinite()) {
    p.potential = potential_with_rejection(p.sigma0_star, p.sigma1_star, f0,
                                           f1, lambda, p.regions.tags());
  }
  return p;
}

// lambda = inf: the attacker discloses, sigma = f.
inline EquilibriumProfile disclosure_profile(const Pmf& f0, const Pmf& f1,
                                             double beta, Penalty lambda,
                                             double r_star) {
  const LikelihoodRatio lr = likelihood_ratio(f1, f0);
  std::vector<Region> tags(f0.size(), Region::kDead);
  for (std::size_t m = 0; m < f0.size(); ++m) {
    if (lr.dead[m]) continue;
    if (ratio_ties(lr.values[m], beta)) {
      tags[m] = Region::kUncertainty;
    } else {
      tags[m] = lr.values[m] > beta ? Region::kRejection : Region::kAcceptance;
    }
  }
  auto p = assemble_profile(f0, f1, beta, lambda, r_star,
                            std::numeric_limits<double>::quiet_NaN(),
                            std::move(tags), StagePoint{f0, f1, 1.0, 1.0});
  return p;
}

// lambda = 0: lying is free. For beta < 1 the attacker puts H0 traffic on
// everything but the most suspicious message m+, matches it with beta times
// as much H1 traffic, and dumps the remaining 1 - beta on m+. For beta >= 1
// it keeps H0 traffic nominal and caps H1 traffic at beta * f0.
inline EquilibriumProfile free_lying_profile(const Pmf& f0, const Pmf& f1,
                                             double beta, double r_star) {
  const Penalty zero(0.0);
  const auto& space = f0.space_ptr();
  const LikelihoodRatio lr = likelihood_ratio(f1, f0);
  const std::vector<std::size_t> live = live_messages(f0, f1);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<Region> tags(f0.size(), Region::kDead);
  for (std::size_t m : live) tags[m] = Region::kAcceptance;

  if (beta < 1.0) {
    std::size_t top = live.front();
    for (std::size_t m : live) {
      if (lr.values[m] > lr.values[top]) top = m;
    }
    if (live.size() == 1) {
      tags[top] = Region::kRejection;
      return assemble_profile(f0, f1, beta, zero, r_star, nan, std::move(tags),
                              StagePoint{f0, f1, 1.0, 1.0});
    }
    std::vector<double> raw0(f0.size(), 0.0);
    double total = 0.0;
    for (std::size_t m : live) {
      if (m == top) continue;
      raw0[m] = f0[m];
      total += f0.probability(m);
    }
    if (total <= 0.0) {
      for (std::size_t m : live) {
        if (m != top) raw0[m] = 1.0;
      }
    }
    Pmf sigma0 = normalize(raw0, space);
    std::vector<double> raw1(f0.size(), 0.0);
    for (std::size_t m = 0; m < f0.size(); ++m) raw1[m] = beta * sigma0[m];
    raw1[top] = (1.0 - beta) / space->weight(top);
    Pmf sigma1 = normalize(raw1, space);
    tags[top] = Region::kRejection;
    double s0 = 0.0;
    for (std::size_t m = 0; m < f0.size(); ++m) s0 += raw0[m] * space->weight(m);
    return assemble_profile(f0, f1, beta, zero, r_star, nan, std::move(tags),
                            StagePoint{std::move(sigma0), std::move(sigma1),
                                       1.0 / s0, nan});
  }

  // beta >= 1: sigma1 = min(c f1, beta f0) with c >= 1 chosen to normalize.
  auto capped_total = [&](double c) {
    double s = 0.0;
    for (std::size_t m = 0; m < f0.size(); ++m) {
      s += std::min(c * f1[m], beta * f0[m]) * space->weight(m);
    }
    return s;
  };
  std::vector<double> raw1(f0.size(), 0.0);
  if (capped_total(1.0) >= 1.0 - 1e-15) {
    raw1 = f1.masses();
  } else {
    double hi = 2.0;
    while (capped_total(hi) < 1.0 && hi < 1e300) hi *= 2.0;
    if (capped_total(hi) < 1.0) {
      raw1 = f0.masses();  // f0 charges messages f1 never uses
    } else {
      const double c = detail::bisect_to_precision(
          [&](double x) { return capped_total(x) - 1.0; }, 1.0, hi);
      for (std::size_t m = 0; m < f0.size(); ++m) {
        raw1[m] = std::min(c * f1[m], beta * f0[m]);
      }
    }
  }
  Pmf sigma1 = normalize(raw1, space);
  for (std::size_t m : live) {
    const double cap = beta * f0[m];
    if (sigma1[m] >= cap * (1.0 - 1e-12) && sigma1[m] > 0.0) {
      tags[m] = Region::kUncertainty;
    }
  }
  return assemble_profile(f0, f1, beta, zero, r_star, nan, std::move(tags),
                          StagePoint{f0, std::move(sigma1), 1.0, nan});
}

inline EquilibriumProfile kkt_threshold_profile(const Pmf& f0, const Pmf& f1,
                                                double beta, Penalty lambda,
                                                const ProactiveOptions& opt) {
  const ZetaSolution sol = solve_zeta(f0, f1, beta, lambda, opt.zeta_search);
  std::vector<Region> tags = sol.regions.tags();
  auto point = strategies_at(f0, f1, beta, lambda, sol.zeta, tags);
  auto p = assemble_profile(f0, f1, beta, lambda, opt.r_star, sol.zeta,
                            std::move(tags), std::move(point));
  p.zeta_root_count = sol.root_count();
  return p;
}

// Live messages grouped by tied likelihood ratio, most suspicious first.
inline std::vector<std::vector<std::size_t>> ratio_groups(const Pmf& f0,
                                                          const Pmf& f1) {
  const LikelihoodRatio lr = likelihood_ratio(f1, f0);
  std::vector<std::size_t> live = live_messages(f0, f1);
  std::stable_sort(live.begin(), live.end(), [&](std::size_t a, std::size_t b) {
    return lr.values[a] > lr.values[b];
  });
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t m : live) {
    if (groups.empty() ||
        !ratio_ties(lr.values[groups.back().front()], lr.values[m])) {
      groups.emplace_back();
    }
    groups.back().push_back(m);
  }
  return groups;
}

struct RejectionCandidate {
  std::optional<EquilibriumProfile> profile;
  std::size_t roots = 0;
};

// Minimizer of the potential subject to rejecting exactly `rejected`
// (sigma1 <= beta sigma0 everywhere else); empty when infeasible.
inline RejectionCandidate solve_with_rejection_set(
    const Pmf& f0, const Pmf& f1, double beta, Penalty lambda, double r_star,
    const std::vector<bool>& rejected) {
  const ZetaEquation eq(f0, f1, beta, lambda, rejected);
  const auto found =
      enumerate_roots(eq, 0.0, std::numeric_limits<double>::infinity());
  RejectionCandidate out;
  out.roots = found.roots.size();
  for (double zeta : found.roots) {
    std::vector<Region> tags = eq.classify(zeta);
    auto point = strategies_at(f0, f1, beta, lambda, zeta, tags);
    auto p = assemble_profile(f0, f1, beta, lambda, r_star, zeta,
                              std::move(tags), std::move(point));
    p.zeta_root_count = found.roots.size();
    if (!out.profile || p.potential < out.profile->potential) {
      out.profile = std::move(p);
    }
  }
  return out;
}

inline constexpr std::size_t kExhaustiveRejectionLimit = 12;

// The optimal rejection set need not be a likelihood-ratio upper set: with
// beta < 1 some H1 mass must be rejected, and it can be cheaper to reject a
// heavy low-ratio message than a light high-ratio one. Every subset of the
// live messages is tried when there are few of them, smallest sets first so
// that ties go to fewer rejected messages. Larger spaces start from the best
// upper set and flip single messages until no flip lowers the potential.
inline EquilibriumProfile potential_minimizing_profile(
    const Pmf& f0, const Pmf& f1, double beta, Penalty lambda,
    double r_star) {
  const std::vector<std::size_t> live = live_messages(f0, f1);
  const std::size_t n = live.size();
  std::optional<EquilibriumProfile> best;
  std::vector<bool> best_set;
  auto consider = [&](const std::vector<bool>& rejected) {
    auto candidate =
        solve_with_rejection_set(f0, f1, beta, lambda, r_star, rejected);
    if (!candidate.profile) return false;
    const double v = candidate.profile->potential;
    if (best && !(v < best->potential - 1e-13 * std::max(1.0, std::abs(v)))) {
      return false;
    }
    best = std::move(candidate.profile);
    best_set = rejected;
    return true;
  };

  std::vector<bool> rejected(f0.size(), false);
  if (n <= kExhaustiveRejectionLimit) {
    std::vector<std::size_t> masks(std::size_t{1} << n);
    for (std::size_t i = 0; i < masks.size(); ++i) masks[i] = i;
    std::stable_sort(masks.begin(), masks.end(), [](std::size_t a, std::size_t b) {
      return std::popcount(a) < std::popcount(b);
    });
    for (std::size_t mask : masks) {
      for (std::size_t i = 0; i < n; ++i) rejected[live[i]] = (mask >> i) & 1;
      consider(rejected);
    }
  } else {
    consider(rejected);
    for (const auto& group : ratio_groups(f0, f1)) {
      for (std::size_t m : group) rejected[m] = true;
      consider(rejected);
    }
    for (bool improved = best.has_value(); improved;) {
      improved = false;
      for (std::size_t m : live) {
        std::vector<bool> flipped = best_set;
        flipped[m] = !flipped[m];
        improved = consider(flipped) || improved;
      }
    }
  }
  if (!best) {
    throw Error(ErrorKind::kNoRoot,
                "no rejection set admits a solution of the balance equation");
  }
  return std::move(*best);
}

}  // namespace detail

inline EquilibriumProfile proactive_equilibrium(const Pmf& f0, const Pmf& f1,
                                                const ThresholdSpec& spec,
                                                Penalty lambda,
                                                const ProactiveOptions& opt = {}) {
  require_same_space(f0, f1);
  if (!(opt.r_star >= 0.0 && opt.r_star <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "r_star must lie in [0, 1]");
  }
  const double beta = spec.beta();
  if (lambda.is_zero()) return detail::free_lying_profile(f0, f1, beta, opt.r_star);
  require_common_support(f0, f1);
  if (lambda.is_infinite()) {
    return detail::disclosure_profile(f0, f1, beta, lambda, opt.r_star);
  }
  if (opt.selection == RegionSelection::kKktThreshold) {
    return detail::kkt_threshold_profile(f0, f1, beta, lambda, opt);
  }
  return detail::potential_minimizing_profile(f0, f1, beta, lambda, opt.r_star);
}

struct ProactiveRocPoint {
  double beta = 0.0;
  double p_f = std::numeric_limits<double>::quiet_NaN();
  double p_d = std::numeric_limits<double>::quiet_NaN();
  double p_d_counterfactual = std::numeric_limits<double>::quiet_NaN();
  std::optional<std::string> failure;  // set when the point has no solution
};

inline std::vector<ProactiveRocPoint> proactive_eroc(
    const Pmf& f0, const Pmf& f1, Penalty lambda,
    const std::vector<double>& beta_grid, const ProactiveOptions& opt = {}) {
  for (std::size_t i = 0; i < beta_grid.size(); ++i) {
    if (!(beta_grid[i] > 0.0) || (i > 0 && !(beta_grid[i] > beta_grid[i - 1]))) {
      throw Error(ErrorKind::kInvalidArgument,
                  "beta grid must be positive and strictly increasing");
    }
  }
  std::vector<ProactiveRocPoint> curve;
  curve.reserve(beta_grid.size());
  for (double beta : beta_grid) {
    ProactiveRocPoint point;
    point.beta = beta;
    try {
      const auto p =
          proactive_equilibrium(f0, f1, ThresholdSpec::from_beta(beta), lambda, opt);
      point.p_f = p.p_f_defacto;
      point.p_d = p.p_d_defacto;
      point.p_d_counterfactual = p.p_d_counterfactual;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kNoRoot) throw;
      point.failure = e.what();
    }
    curve.push_back(std::move(point));
  }
  return curve;
}

}  // namespace npgame

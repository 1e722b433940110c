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

// Brute-force certification of equilibria on small message spaces: evaluate
// the attacker's potential on a simplex grid and check the KKT identities
// with finite differences.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <variant>
#include <vector>

#include "npgame/error.hpp"
#include "npgame/neyman_pearson.hpp"
#include "npgame/passive.hpp"
#include "npgame/penalty.hpp"
#include "npgame/pmf.hpp"
#include "npgame/proactive.hpp"

namespace npgame {

// Detector that strictly rejects a fixed message set (passive play).
struct FixedRejection {
  std::vector<bool> rejected;

  static FixedRejection from_rule(const DecisionRule& rule) {
    FixedRejection out;
    for (double a : rule.accept_prob) out.rejected.push_back(a == 1.0);
    return out;
  }
};

// Detector that rejects where sigma1 > beta * sigma0 (proactive play).
struct InducedRejection {
  double beta = 1.0;
};

using RejectionRule = std::variant<FixedRejection, InducedRejection>;

inline constexpr double kInducedRuleTolerance = 1e-12;

inline bool induced_rejects(double s0, double s1, double beta) {
  const double b0 = beta * s0;
  return s1 - b0 > kInducedRuleTolerance * std::max(s1, b0);
}

// Rejected H1 mass plus lambda-weighted KL cost. For an infinite lambda the
// value is the limit objective divided by lambda, i.e. the KL sum.
inline double potential_value(const Pmf& sigma0, const Pmf& sigma1,
                              const Pmf& f0, const Pmf& f1, Penalty lambda,
                              const RejectionRule& rule) {
  require_same_space(sigma0, f0);
  require_same_space(sigma1, f1);
  require_same_space(sigma0, sigma1);
  const double kl = kl_divergence(sigma1, f1) + kl_divergence(sigma0, f0);
  if (lambda.is_infinite()) return kl;
  double rejected = 0.0;
  if (const auto* fixed = std::get_if<FixedRejection>(&rule)) {
    for (std::size_t m = 0; m < sigma1.size(); ++m) {
      if (fixed->rejected.at(m)) rejected += sigma1.probability(m);
    }
  } else {
    const double beta = std::get<InducedRejection>(rule).beta;
    for (std::size_t m = 0; m < sigma1.size(); ++m) {
      if (induced_rejects(sigma0[m], sigma1[m], beta)) {
        rejected += sigma1.probability(m);
      }
    }
  }
  return rejected + (lambda.is_zero() ? 0.0 : lambda.value() * kl);
}

// What the oracle needs to know about a claimed equilibrium.
struct CandidateProfile {
  Pmf sigma0;
  Pmf sigma1;
  RejectionRule rule;
  RegionPartition regions;
  double beta = std::numeric_limits<double>::quiet_NaN();  // M* constraint
  double c0 = std::numeric_limits<double>::quiet_NaN();
  double c1 = std::numeric_limits<double>::quiet_NaN();
  double zeta = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> rho = {};  // multiplier of sigma1 <= beta sigma0, per m
};

inline CandidateProfile candidate_from(const PassiveEquilibrium& eq) {
  CandidateProfile c{eq.sigma0_star, eq.sigma1_star,
                     FixedRejection::from_rule(eq.rule), eq.regions, {}};
  c.c0 = 1.0;
  c.c1 = 1.0 / eq.normalizer;
  c.rho.assign(eq.sigma0_star.size(), 0.0);
  return c;
}

inline CandidateProfile candidate_from(const EquilibriumProfile& p) {
  CandidateProfile c{p.sigma0_star, p.sigma1_star, InducedRejection{p.beta},
                     p.regions, {}};
  c.beta = p.beta;
  c.c0 = p.c0;
  c.c1 = p.c1;
  c.zeta = p.zeta;
  c.rho = p.rho0;
  return c;
}

struct OracleReport {
  double objective_at_solution = 0.0;
  double best_grid_objective = 0.0;
  std::optional<std::pair<Pmf, Pmf>> best_grid_point;
  double improvement = 0.0;  // objective_at_solution - best_grid_objective
  double grid_step = 0.0;
  std::size_t evaluations = 0;
  // KKT checks; NaN where the identity does not apply.
  double stationarity_residual = std::numeric_limits<double>::quiet_NaN();
  double slackness_residual = std::numeric_limits<double>::quiet_NaN();
  double c_relation_residual = std::numeric_limits<double>::quiet_NaN();
};

inline constexpr std::size_t kOracleMaxMessages = 3;
inline constexpr double kOracleMaxEvaluations = 4e9;

namespace detail {

// Probability vectors with entries in multiples of 1/steps on the live
// coordinates, converted to densities.
inline std::vector<std::vector<double>> simplex_grid(
    const MessageSpace& space, const std::vector<std::size_t>& live,
    std::size_t steps) {
  std::vector<std::vector<double>> points;
  std::vector<std::size_t> counts(live.size(), 0);
  auto emit = [&]() {
    std::vector<double> d(space.size(), 0.0);
    for (std::size_t i = 0; i < live.size(); ++i) {
      d[live[i]] = static_cast<double>(counts[i]) / static_cast<double>(steps) /
                   space.weight(live[i]);
    }
    points.push_back(std::move(d));
  };
  auto recurse = [&](auto&& self, std::size_t i, std::size_t left) -> void {
    if (i + 1 == live.size()) {
      counts[i] = left;
      emit();
      return;
    }
    for (std::size_t k = 0; k <= left; ++k) {
      counts[i] = k;
      self(self, i + 1, left - k);
    }
  };
  recurse(recurse, 0, steps);
  return points;
}

// Sum of p ln(p/f) on raw (possibly unnormalized) densities; +inf when p
// charges a message f does not.
inline double raw_kl(const std::vector<double>& p, const Pmf& f) {
  double sum = 0.0;
  for (std::size_t m = 0; m < p.size(); ++m) {
    if (p[m] == 0.0) continue;
    if (f[m] == 0.0) return std::numeric_limits<double>::infinity();
    sum += p[m] * f.space().weight(m) * std::log(p[m] / f[m]);
  }
  return sum;
}

inline double lagrangian(const std::vector<double>& s0,
                         const std::vector<double>& s1, const Pmf& f0,
                         const Pmf& f1, Penalty lambda,
                         const CandidateProfile& c, double gamma0,
                         double gamma1) {
  const MessageSpace& space = f0.space();
  double value = lambda.value() * (raw_kl(s1, f1) + raw_kl(s0, f0));
  double total0 = 0.0, total1 = 0.0;
  for (std::size_t m = 0; m < s0.size(); ++m) {
    const double w = space.weight(m);
    total0 += s0[m] * w;
    total1 += s1[m] * w;
    switch (c.regions.at(m)) {
      case Region::kRejection:
        value += s1[m] * w;
        break;
      case Region::kUncertainty:
        if (std::isfinite(c.beta)) {
          value += c.rho[m] * (s1[m] - c.beta * s0[m]) * w;
        }
        break;
      default:
        break;
    }
  }
  return value + gamma0 * (total0 - 1.0) + gamma1 * (total1 - 1.0);
}

inline double stationarity_residual(const CandidateProfile& c, const Pmf& f0,
                                    const Pmf& f1, Penalty lambda) {
  const double gamma0 = -lambda.value() * (1.0 + std::log(c.c0));
  const double gamma1 = -lambda.value() * (1.0 + std::log(c.c1));
  std::vector<double> s0 = c.sigma0.masses();
  std::vector<double> s1 = c.sigma1.masses();
  double worst = 0.0;
  for (std::vector<double>* s : {&s0, &s1}) {
    for (std::size_t m = 0; m < s->size(); ++m) {
      const double x = (*s)[m];
      if (x <= 0.0) continue;
      const double h = std::min(1e-6, 0.5 * x);
      (*s)[m] = x + h;
      const double up = lagrangian(s0, s1, f0, f1, lambda, c, gamma0, gamma1);
      (*s)[m] = x - h;
      const double down = lagrangian(s0, s1, f0, f1, lambda, c, gamma0, gamma1);
      (*s)[m] = x;
      worst = std::max(worst, std::abs(up - down) / (2.0 * h));
    }
  }
  return worst;
}

}  // namespace detail

inline OracleReport grid_best_response_check(const CandidateProfile& c,
                                              const Pmf& f0, const Pmf& f1,
                                              Penalty lambda,
                                              double step = 1e-3) {
  require_same_space(f0, f1);
  require_same_space(c.sigma0, f0);
  if (f0.size() > kOracleMaxMessages) {
    throw Error(ErrorKind::kSpaceTooLarge,
                "grid certification supports at most 3 messages");
  }
  if (!(step > 0.0 && step <= 0.5)) {
    throw Error(ErrorKind::kInvalidArgument, "grid step must lie in (0, 0.5]");
  }
  const auto steps = static_cast<std::size_t>(std::llround(1.0 / step));
  const std::vector<std::size_t> live = live_messages(f0, f1);
  const auto grid0 = detail::simplex_grid(f0.space(), live, steps);
  const auto grid1 = detail::simplex_grid(f0.space(), live, steps);

  OracleReport report;
  report.grid_step = 1.0 / static_cast<double>(steps);
  report.objective_at_solution =
      potential_value(c.sigma0, c.sigma1, f0, f1, lambda, c.rule);

  const double scale = lambda.is_infinite() ? 1.0 : lambda.value();
  std::vector<double> kl0(grid0.size()), kl1(grid1.size());
  for (std::size_t i = 0; i < grid0.size(); ++i) kl0[i] = detail::raw_kl(grid0[i], f0);
  for (std::size_t i = 0; i < grid1.size(); ++i) kl1[i] = detail::raw_kl(grid1[i], f1);
  auto cost = [&](double kl) {
    if (lambda.is_zero()) return std::isfinite(kl) ? 0.0 : kl;
    return scale * kl;
  };
  auto rejected_mass = [&](const std::vector<double>& s1,
                           const std::vector<bool>& rejected) {
    double r = 0.0;
    for (std::size_t m = 0; m < s1.size(); ++m) {
      if (rejected[m]) r += s1[m] * f0.space().weight(m);
    }
    return r;
  };

  double best = std::numeric_limits<double>::infinity();
  std::size_t best0 = 0, best1 = 0;
  if (const auto* fixed = std::get_if<FixedRejection>(&c.rule)) {
    // The objective separates into a sigma0 part and a sigma1 part, so the
    // product-grid minimum is the sum of the two coordinate minima.
    double b0 = std::numeric_limits<double>::infinity();
    double b1 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid0.size(); ++i) {
      if (cost(kl0[i]) < b0) { b0 = cost(kl0[i]); best0 = i; }
    }
    for (std::size_t i = 0; i < grid1.size(); ++i) {
      const double rej =
          lambda.is_infinite() ? 0.0 : rejected_mass(grid1[i], fixed->rejected);
      const double v = rej + cost(kl1[i]);
      if (v < b1) { b1 = v; best1 = i; }
    }
    best = b0 + b1;
    report.evaluations = grid0.size() + grid1.size();
  } else {
    const double beta = std::get<InducedRejection>(c.rule).beta;
    const double pairs =
        static_cast<double>(grid0.size()) * static_cast<double>(grid1.size());
    if (pairs > kOracleMaxEvaluations) {
      throw Error(ErrorKind::kInvalidArgument,
                  "grid too fine for a product search; use a coarser step");
    }
    for (std::size_t i = 0; i < grid0.size(); ++i) {
      const double c0 = cost(kl0[i]);
      if (!std::isfinite(c0)) continue;
      const auto& s0 = grid0[i];
      for (std::size_t j = 0; j < grid1.size(); ++j) {
        const double c1 = cost(kl1[j]);
        if (!std::isfinite(c1)) continue;
        double rej = 0.0;
        if (!lambda.is_infinite()) {
          const auto& s1 = grid1[j];
          for (std::size_t m = 0; m < s1.size(); ++m) {
            if (induced_rejects(s0[m], s1[m], beta)) {
              rej += s1[m] * f0.space().weight(m);
            }
          }
        }
        const double v = rej + c0 + c1;
        if (v < best) { best = v; best0 = i; best1 = j; }
      }
    }
    report.evaluations = grid0.size() * grid1.size();
  }
  report.best_grid_objective = best;
  report.best_grid_point.emplace(normalize(grid0[best0], f0.space_ptr()),
                                 normalize(grid1[best1], f0.space_ptr()));
  report.improvement = report.objective_at_solution - best;

  if (lambda.is_finite_positive()) {
    report.stationarity_residual = detail::stationarity_residual(c, f0, f1, lambda);
  }
  if (std::isfinite(c.beta)) {
    double slack = 0.0;
    for (std::size_t m : c.regions.m_star()) {
      const double a = c.sigma1[m], b = c.beta * c.sigma0[m];
      slack = std::max(slack, std::abs(a - b) / std::max({a, b, 1e-300}));
    }
    report.slackness_residual = slack;
    if (std::isfinite(c.zeta)) {
      const double rhs = c.beta * c.zeta * c.c0;
      report.c_relation_residual = std::abs(c.c1 - rhs) / std::max(c.c1, rhs);
    }
  }
  return report;
}

inline OracleReport grid_best_response_check(const PassiveEquilibrium& eq,
                                              const Pmf& f0, const Pmf& f1,
                                              double step = 1e-3) {
  return grid_best_response_check(candidate_from(eq), f0, f1, eq.lambda, step);
}

inline OracleReport grid_best_response_check(const EquilibriumProfile& p,
                                              const Pmf& f0, const Pmf& f1,
                                              double step = 1e-3) {
  return grid_best_response_check(candidate_from(p), f0, f1, p.lambda, step);
}

}  // namespace npgame

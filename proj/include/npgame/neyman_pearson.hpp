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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "npgame/error.hpp"
#include "npgame/pmf.hpp"

namespace npgame {

enum class Region { kAcceptance, kUncertainty, kRejection, kDead };

constexpr std::string_view to_string(Region region) {
  switch (region) {
    case Region::kAcceptance: return "M0";
    case Region::kUncertainty: return "Mstar";
    case Region::kRejection: return "M1";
    case Region::kDead: return "dead";
  }
  return "?";
}

// Partition of the live messages into acceptance (M0), uncertainty (M*) and
// rejection (M1). Dead messages carry the kDead tag and belong to no set.
class RegionPartition {
 public:
  RegionPartition() = default;
  explicit RegionPartition(std::vector<Region> tags) : tags_(std::move(tags)) {}

  std::size_t size() const noexcept { return tags_.size(); }
  Region at(std::size_t m) const { return tags_.at(m); }
  const std::vector<Region>& tags() const noexcept { return tags_; }

  std::vector<std::size_t> indices(Region region) const {
    std::vector<std::size_t> out;
    for (std::size_t m = 0; m < tags_.size(); ++m) {
      if (tags_[m] == region) out.push_back(m);
    }
    return out;
  }
  std::vector<std::size_t> m0() const { return indices(Region::kAcceptance); }
  std::vector<std::size_t> m_star() const {
    return indices(Region::kUncertainty);
  }
  std::vector<std::size_t> m1() const { return indices(Region::kRejection); }

  bool operator==(const RegionPartition&) const = default;

 private:
  std::vector<Region> tags_;
};

// accept_prob(m) is the probability of declaring H1 on message m.
struct DecisionRule {
  std::vector<double> accept_prob;
  double tau = std::numeric_limits<double>::quiet_NaN();
  double randomization = 0.0;

  std::size_t size() const noexcept { return accept_prob.size(); }
  double operator[](std::size_t m) const { return accept_prob[m]; }
  bool operator==(const DecisionRule&) const = default;
};

struct NpTest {
  DecisionRule rule;
  RegionPartition regions;
};

struct Rates {
  double p_f = 0.0;
  double p_d = 0.0;
};

struct RocPoint {
  double alpha = 0.0;
  double p_f = 0.0;
  double p_d = 0.0;
};

// Relative tolerance under which two likelihood ratios count as tied.
inline constexpr double kTieTolerance = 1e-12;

namespace detail {

struct SizedTest {
  std::vector<double> accept;
  std::size_t threshold_atom = 0;  // an atom whose key is the threshold
  double randomization = 0.0;
};

// Randomized test of exact size alpha over atoms ranked by `keys` (larger
// key = stronger evidence for H1). `null_mass` is each atom's probability
// under H0. Keys within `key_tolerance` of a group's leading key share the
// same randomization.
inline SizedTest size_alpha_test(const std::vector<double>& keys,
                                 const std::vector<double>& null_mass,
                                 double alpha, double key_tolerance) {
  const std::size_t n = keys.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a,
                                                   std::size_t b) {
    return keys[a] > keys[b];
  });

  // Groups of tied atoms, strongest first.
  std::vector<std::pair<std::size_t, std::size_t>> groups;  // [begin, end)
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    const double lead = keys[order[i]];
    while (j < n) {
      const double k = keys[order[j]];
      const bool tied = (lead == k) || (std::isfinite(lead) &&
                                        lead - k <= key_tolerance);
      if (!tied) break;
      ++j;
    }
    groups.emplace_back(i, j);
    i = j;
  }

  SizedTest out;
  out.accept.assign(n, 0.0);
  if (groups.empty()) return out;

  // The threshold group is the last one whose strictly-stronger mass is
  // still within the size budget.
  std::size_t chosen = 0;
  double strict_mass = 0.0;
  double chosen_strict = 0.0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (strict_mass > alpha) break;
    chosen = g;
    chosen_strict = strict_mass;
    for (std::size_t i = groups[g].first; i < groups[g].second; ++i) {
      strict_mass += null_mass[order[i]];
    }
  }
  double tie_mass = 0.0;
  for (std::size_t i = groups[chosen].first; i < groups[chosen].second; ++i) {
    tie_mass += null_mass[order[i]];
  }
  double r = tie_mass > 0.0 ? (alpha - chosen_strict) / tie_mass : 1.0;
  r = std::clamp(r, 0.0, 1.0);
  if (r > 1.0 - 1e-12) r = 1.0;
  if (r < 1e-12) r = 0.0;

  for (std::size_t g = 0; g < chosen; ++g) {
    for (std::size_t i = groups[g].first; i < groups[g].second; ++i) {
      out.accept[order[i]] = 1.0;
    }
  }
  for (std::size_t i = groups[chosen].first; i < groups[chosen].second; ++i) {
    out.accept[order[i]] = r;
  }
  out.threshold_atom = order[groups[chosen].first];
  out.randomization = r;
  return out;
}

// Region tags that follow what the rule does: strict rejection, strict
// acceptance, or a genuinely randomized tie.
inline RegionPartition regions_from_rule(const std::vector<double>& accept,
                                         const LikelihoodRatio& lr) {
  std::vector<Region> tags(accept.size());
  for (std::size_t m = 0; m < accept.size(); ++m) {
    if (lr.dead[m]) {
      tags[m] = Region::kDead;
    } else if (accept[m] == 1.0) {
      tags[m] = Region::kRejection;
    } else if (accept[m] == 0.0) {
      tags[m] = Region::kAcceptance;
    } else {
      tags[m] = Region::kUncertainty;
    }
  }
  return RegionPartition(std::move(tags));
}

inline bool ratio_ties(double a, double b) {
  if (a == b) return true;
  if (!std::isfinite(a) || !std::isfinite(b)) return false;
  return std::abs(a - b) <= kTieTolerance * std::max(std::abs(a), std::abs(b));
}

}  // namespace detail

inline void validate_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw Error(ErrorKind::kInvalidAlpha,
                "alpha must lie in (0, 1], got " + std::to_string(alpha));
  }
}

// Size-alpha randomized likelihood-ratio test on the nominal densities.
inline NpTest np_rule(const Pmf& f0, const Pmf& f1, double alpha) {
  require_common_support(f0, f1);
  validate_alpha(alpha);
  const LikelihoodRatio lr = likelihood_ratio(f1, f0);

  const std::vector<std::size_t> live = live_messages(f0, f1);
  std::vector<double> keys;
  std::vector<double> null_mass;
  for (std::size_t m : live) {
    keys.push_back(std::log(lr.values[m]));
    null_mass.push_back(f0.probability(m));
  }
  const auto sized =
      detail::size_alpha_test(keys, null_mass, alpha, kTieTolerance);

  NpTest test;
  test.rule.accept_prob.assign(f0.size(), 0.0);
  for (std::size_t i = 0; i < live.size(); ++i) {
    test.rule.accept_prob[live[i]] = sized.accept[i];
  }
  test.rule.tau = lr.values[live[sized.threshold_atom]];
  test.rule.randomization = sized.randomization;
  test.regions = detail::regions_from_rule(test.rule.accept_prob, lr);
  return test;
}

// Non-randomized-by-size variant: reject when LR > beta, play r_star on ties.
inline NpTest lr_threshold_rule(const Pmf& f0, const Pmf& f1, double beta,
                                double r_star = 0.0) {
  require_common_support(f0, f1);
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw Error(ErrorKind::kInvalidArgument,
                "likelihood-ratio threshold must be positive and finite");
  }
  if (!(r_star >= 0.0 && r_star <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "r_star must lie in [0, 1]");
  }
  const LikelihoodRatio lr = likelihood_ratio(f1, f0);
  NpTest test;
  test.rule.tau = beta;
  test.rule.randomization = r_star;
  test.rule.accept_prob.assign(f0.size(), 0.0);
  for (std::size_t m = 0; m < f0.size(); ++m) {
    if (lr.dead[m]) continue;
    if (detail::ratio_ties(lr.values[m], beta)) {
      test.rule.accept_prob[m] = r_star;
    } else if (lr.values[m] > beta) {
      test.rule.accept_prob[m] = 1.0;
    }
  }
  test.regions = detail::regions_from_rule(test.rule.accept_prob, lr);
  return test;
}

inline Rates rates(const DecisionRule& rule, const Pmf& g0, const Pmf& g1) {
  require_same_space(g0, g1);
  if (rule.size() != g0.size()) {
    throw Error(ErrorKind::kSpaceMismatch, "rule does not align with space");
  }
  return Rates{weighted_total(rule.accept_prob, g0),
               weighted_total(rule.accept_prob, g1)};
}

inline void validate_alpha_grid(const std::vector<double>& grid) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    validate_alpha(grid[i]);
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw Error(ErrorKind::kInvalidArgument,
                  "alpha grid must be strictly increasing");
    }
  }
}

inline std::vector<RocPoint> roc_curve(const Pmf& f0, const Pmf& f1,
                                       const std::vector<double>& alpha_grid) {
  validate_alpha_grid(alpha_grid);
  std::vector<RocPoint> curve;
  curve.reserve(alpha_grid.size());
  for (double alpha : alpha_grid) {
    const Rates r = rates(np_rule(f0, f1, alpha).rule, f0, f1);
    curve.push_back({alpha, r.p_f, r.p_d});
  }
  return curve;
}

}  // namespace npgame

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

// Repeated observations. The proactive game is solved by forward induction
// over the full message-history tree; the passive and attacker-free
// baselines run a product likelihood-ratio test on the nominal densities.
// Everything is exact enumeration.

#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "npgame/error.hpp"
#include "npgame/neyman_pearson.hpp"
#include "npgame/passive.hpp"
#include "npgame/penalty.hpp"
#include "npgame/pmf.hpp"
#include "npgame/proactive.hpp"

namespace npgame {

inline constexpr std::size_t kDefaultEnumerationCap = 1'000'000;

struct HistoryNode {
  std::size_t depth = 1;  // stage index j, root = 1
  std::size_t parent = 0;
  std::size_t message = 0;  // last message of the path (unused at the root)
  std::size_t first_child = 0;
  double beta_j = 0.0;
  // Stage equilibrium at beta_j (shared between nodes with equal beta_j).
  std::shared_ptr<const EquilibriumProfile> stage;
  Posterior belief;  // p(H | m^(j-1)), the belief entering stage j
  // Probability of the path under each hypothesis's stage strategies.
  double path_mass0 = 1.0;
  double path_mass1 = 1.0;

  double zeta_j() const { return stage->zeta; }
  const Pmf& stage_sigma0() const { return stage->sigma0_star; }
  const Pmf& stage_sigma1() const { return stage->sigma1_star; }
  const DecisionRule& stage_rule() const { return stage->rule; }
};

// Level-order tree: depth-j nodes are contiguous and every node's children
// follow the live messages in index order.
class HistoryTree {
 public:
  HistoryTree(std::vector<HistoryNode> nodes, std::vector<std::size_t> live,
              std::size_t stages, std::vector<std::size_t> level_begin)
      : nodes_(std::move(nodes)),
        live_(std::move(live)),
        stages_(stages),
        level_begin_(std::move(level_begin)) {}

  std::size_t stages() const noexcept { return stages_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  std::size_t branching() const noexcept { return live_.size(); }
  const std::vector<std::size_t>& live() const noexcept { return live_; }
  const HistoryNode& node(std::size_t i) const { return nodes_.at(i); }
  const HistoryNode& root() const { return nodes_.front(); }
  const std::vector<HistoryNode>& nodes() const noexcept { return nodes_; }

  // Node index range [begin, end) of depth j.
  std::pair<std::size_t, std::size_t> level(std::size_t j) const {
    if (j < 1 || j > stages_) {
      throw Error(ErrorKind::kInvalidArgument, "stage index out of range");
    }
    return {level_begin_[j - 1], level_begin_[j]};
  }

  bool is_leaf(std::size_t i) const { return nodes_.at(i).depth == stages_; }

  std::vector<std::size_t> message_path(std::size_t i) const {
    std::vector<std::size_t> path(nodes_.at(i).depth - 1);
    for (std::size_t k = path.size(); k > 0; --k) {
      path[k - 1] = nodes_[i].message;
      i = nodes_[i].parent;
    }
    return path;
  }

 private:
  std::vector<HistoryNode> nodes_;
  std::vector<std::size_t> live_;
  std::size_t stages_;
  std::vector<std::size_t> level_begin_;
};

struct SequentialOptions {
  ProactiveOptions proactive;
  std::size_t enumeration_cap = kDefaultEnumerationCap;
};

namespace detail {

inline void check_enumeration(std::size_t branching, std::size_t stages,
                              std::size_t cap) {
  if (stages < 1) {
    throw Error(ErrorKind::kInvalidArgument, "need at least one stage");
  }
  double paths = 1.0;
  for (std::size_t j = 0; j < stages; ++j) paths *= static_cast<double>(branching);
  if (paths > static_cast<double>(cap)) {
    throw Error(ErrorKind::kCapExceeded,
                std::to_string(branching) + "^" + std::to_string(stages) +
                    " message paths exceed the enumeration cap of " +
                    std::to_string(cap));
  }
}

inline std::string format_path(const MessageSpace& space,
                               const std::vector<std::size_t>& path) {
  std::string s = "[";
  for (std::size_t k = 0; k < path.size(); ++k) {
    if (k) s += ",";
    s += space.label(path[k]);
  }
  return s + "]";
}

}  // namespace detail

inline HistoryTree forward_induction(const Pmf& f0, const Pmf& f1,
                                     const ThresholdSpec& spec, Penalty lambda,
                                     std::size_t stages,
                                     const SequentialOptions& opt = {}) {
  require_common_support(f0, f1);
  if (lambda.is_zero()) {
    throw Error(ErrorKind::kInvalidArgument,
                "the repeated game needs lambda > 0");
  }
  const std::vector<std::size_t> live = live_messages(f0, f1);
  detail::check_enumeration(live.size(), stages, opt.enumeration_cap);

  std::map<double, std::shared_ptr<const EquilibriumProfile>> cache;
  std::vector<HistoryNode> nodes;
  std::vector<std::size_t> level_begin{0};

  auto path_of = [&](std::size_t i) {
    std::vector<std::size_t> path(nodes[i].depth - 1);
    for (std::size_t k = path.size(); k > 0; --k) {
      path[k - 1] = nodes[i].message;
      i = nodes[i].parent;
    }
    return path;
  };

  // Stage equilibria depend on the history only through beta_j.
  auto solve_stage = [&](std::size_t i) {
    const double beta_j = nodes[i].beta_j;
    auto it = cache.find(beta_j);
    if (it != cache.end()) {
      nodes[i].stage = it->second;
      return;
    }
    try {
      auto p = std::make_shared<const EquilibriumProfile>(proactive_equilibrium(
          f0, f1, ThresholdSpec::from_beta(beta_j), lambda, opt.proactive));
      cache.emplace(beta_j, p);
      nodes[i].stage = std::move(p);
    } catch (const Error& e) {
      throw Error(e.kind(), std::string(e.what()) + " at history " +
                                detail::format_path(f0.space(), path_of(i)));
    }
  };

  HistoryNode root;
  root.beta_j = spec.beta();
  root.belief = Posterior{spec.prior0(), spec.prior1()};
  nodes.push_back(std::move(root));
  solve_stage(0);
  level_begin.push_back(1);

  for (std::size_t j = 1; j < stages; ++j) {
    const std::size_t begin = level_begin[j - 1];
    const std::size_t end = level_begin[j];
    nodes.reserve(nodes.size() + (end - begin) * live.size());
    for (std::size_t i = begin; i < end; ++i) {
      nodes[i].first_child = nodes.size();
      for (std::size_t m : live) {
        const HistoryNode& parent = nodes[i];
        const Pmf& s0 = parent.stage_sigma0();
        const Pmf& s1 = parent.stage_sigma1();
        HistoryNode child;
        child.depth = j + 1;
        child.parent = i;
        child.message = m;
        child.beta_j = parent.beta_j * s0[m] / s1[m];
        child.belief =
            posterior(parent.belief.h0, parent.belief.h1, s0, s1, m);
        child.path_mass0 = parent.path_mass0 * s0.probability(m);
        child.path_mass1 = parent.path_mass1 * s1.probability(m);
        nodes.push_back(std::move(child));
        solve_stage(nodes.size() - 1);
      }
    }
    level_begin.push_back(nodes.size());
  }
  return HistoryTree(std::move(nodes), live, stages, std::move(level_begin));
}

// Stage-j detection and false-alarm rates of the proactive detector.
inline Rates sequential_rates(const HistoryTree& tree, std::size_t j) {
  const auto [begin, end] = tree.level(j);
  Rates r;
  for (std::size_t i = begin; i < end; ++i) {
    const HistoryNode& node = tree.node(i);
    const auto& rule = node.stage_rule().accept_prob;
    r.p_f += node.path_mass0 * weighted_total(rule, node.stage_sigma0());
    r.p_d += node.path_mass1 * weighted_total(rule, node.stage_sigma1());
  }
  return r;
}

// Product test at a fixed likelihood-ratio threshold.
struct RatioThreshold {
  double beta = 1.0;
  double r_star = 0.0;
};

namespace detail {

inline constexpr double kProductTieTolerance = 1e-9;

// Stage-wise rates of a product likelihood-ratio test on the nominal
// densities when traffic follows q0 / q1 i.i.d. Exactly one of `alpha`,
// `ratio` drives the test.
inline std::vector<Rates> product_test_rates(
    const Pmf& f0, const Pmf& f1, const Pmf& q0, const Pmf& q1,
    const double* alpha, const RatioThreshold* ratio, std::size_t stages,
    std::size_t cap) {
  const std::vector<std::size_t> live = live_messages(f0, f1);
  check_enumeration(live.size(), stages, cap);
  const LikelihoodRatio lr = likelihood_ratio(f1, f0);

  std::vector<double> key{0.0}, p0{1.0}, m0{1.0}, m1{1.0};
  std::vector<Rates> out;
  out.reserve(stages);
  for (std::size_t j = 1; j <= stages; ++j) {
    std::vector<double> nkey, np0, nm0, nm1;
    const std::size_t n = key.size() * live.size();
    nkey.reserve(n);
    np0.reserve(n);
    nm0.reserve(n);
    nm1.reserve(n);
    for (std::size_t i = 0; i < key.size(); ++i) {
      for (std::size_t m : live) {
        nkey.push_back(key[i] + std::log(lr.values[m]));
        np0.push_back(p0[i] * f0.probability(m));
        nm0.push_back(m0[i] * q0.probability(m));
        nm1.push_back(m1[i] * q1.probability(m));
      }
    }
    key.swap(nkey);
    p0.swap(np0);
    m0.swap(nm0);
    m1.swap(nm1);

    std::vector<double> accept(key.size(), 0.0);
    if (alpha != nullptr) {
      accept = size_alpha_test(key, p0, *alpha, kProductTieTolerance).accept;
    } else {
      const double log_beta = std::log(ratio->beta);
      for (std::size_t i = 0; i < key.size(); ++i) {
        if (std::abs(key[i] - log_beta) <= kProductTieTolerance) {
          accept[i] = ratio->r_star;
        } else if (key[i] > log_beta) {
          accept[i] = 1.0;
        }
      }
    }
    Rates r;
    for (std::size_t i = 0; i < key.size(); ++i) {
      r.p_f += accept[i] * m0[i];
      r.p_d += accept[i] * m1[i];
    }
    out.push_back(r);
  }
  return out;
}

}  // namespace detail

inline std::vector<Rates> nonadversarial_sequential_rates(
    const Pmf& f0, const Pmf& f1, double alpha, std::size_t stages,
    std::size_t cap = kDefaultEnumerationCap) {
  require_common_support(f0, f1);
  validate_alpha(alpha);
  return detail::product_test_rates(f0, f1, f0, f1, &alpha, nullptr, stages,
                                    cap);
}

inline std::vector<Rates> nonadversarial_sequential_rates(
    const Pmf& f0, const Pmf& f1, const RatioThreshold& threshold,
    std::size_t stages, std::size_t cap = kDefaultEnumerationCap) {
  lr_threshold_rule(f0, f1, threshold.beta, threshold.r_star);  // validation
  return detail::product_test_rates(f0, f1, f0, f1, nullptr, &threshold,
                                    stages, cap);
}

// The attacker replays the single-stage passive equilibrium at every stage.
inline std::vector<Rates> passive_sequential_rates(
    const Pmf& f0, const Pmf& f1, double alpha, Penalty lambda,
    std::size_t stages, std::size_t cap = kDefaultEnumerationCap) {
  const auto eq = passive_equilibrium(f0, f1, alpha, lambda);
  return detail::product_test_rates(f0, f1, eq.sigma0_star, eq.sigma1_star,
                                    &alpha, nullptr, stages, cap);
}

inline std::vector<Rates> passive_sequential_rates(
    const Pmf& f0, const Pmf& f1, const RatioThreshold& threshold,
    Penalty lambda, std::size_t stages,
    std::size_t cap = kDefaultEnumerationCap) {
  const auto eq = passive_response(
      f0, f1, lr_threshold_rule(f0, f1, threshold.beta, threshold.r_star),
      lambda);
  return detail::product_test_rates(f0, f1, eq.sigma0_star, eq.sigma1_star,
                                    nullptr, &threshold, stages, cap);
}

}  // namespace npgame

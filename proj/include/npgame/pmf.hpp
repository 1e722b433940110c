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

#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "npgame/error.hpp"

namespace npgame {

// Finite message space. A continuous density enters through a grid whose
// points carry quadrature weights, so every integral is a weighted sum.
class MessageSpace {
 public:
  explicit MessageSpace(std::vector<std::string> labels,
                        std::vector<double> weights = {})
      : labels_(std::move(labels)), weights_(std::move(weights)) {
    if (labels_.empty()) {
      throw Error(ErrorKind::kInvalidArgument, "message space is empty");
    }
    if (weights_.empty()) weights_.assign(labels_.size(), 1.0);
    if (weights_.size() != labels_.size()) {
      throw Error(ErrorKind::kInvalidArgument,
                  "weights do not align with message labels");
    }
    std::set<std::string_view> seen;
    for (const auto& label : labels_) {
      if (!seen.insert(label).second) {
        throw Error(ErrorKind::kInvalidArgument,
                    "duplicate message label '" + label + "'");
      }
    }
    for (double w : weights_) {
      if (!(w > 0.0) || !std::isfinite(w)) {
        throw Error(ErrorKind::kInvalidArgument,
                    "quadrature weights must be positive and finite");
      }
    }
  }

  static std::shared_ptr<const MessageSpace> indexed(std::size_t n) {
    std::vector<std::string> labels;
    labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
    return std::make_shared<const MessageSpace>(std::move(labels));
  }

  std::size_t size() const noexcept { return labels_.size(); }
  const std::string& label(std::size_t m) const { return labels_.at(m); }
  double weight(std::size_t m) const { return weights_.at(m); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

  std::optional<std::size_t> index_of(std::string_view label) const {
    for (std::size_t m = 0; m < labels_.size(); ++m) {
      if (labels_[m] == label) return m;
    }
    return std::nullopt;
  }

  bool operator==(const MessageSpace&) const = default;

 private:
  std::vector<std::string> labels_;
  std::vector<double> weights_;
};

using SpacePtr = std::shared_ptr<const MessageSpace>;

inline constexpr double kNormalizationTolerance = 1e-12;

// Probability mass function (density with respect to the space's weights).
class Pmf {
 public:
  Pmf(SpacePtr space, std::vector<double> masses)
      : space_(std::move(space)), masses_(std::move(masses)) {
    if (!space_) throw Error(ErrorKind::kInvalidArgument, "null message space");
    if (masses_.size() != space_->size()) {
      throw Error(ErrorKind::kSpaceMismatch,
                  "mass vector does not align with the message space");
    }
    double total = 0.0;
    for (std::size_t m = 0; m < masses_.size(); ++m) {
      if (!std::isfinite(masses_[m])) {
        throw Error(ErrorKind::kInvalidArgument, "non-finite mass");
      }
      if (masses_[m] < 0.0) {
        throw Error(ErrorKind::kNegativeMass, "negative mass");
      }
      total += masses_[m] * space_->weight(m);
    }
    if (std::abs(total - 1.0) > kNormalizationTolerance) {
      throw Error(ErrorKind::kInvalidArgument,
                  "masses do not sum to one (total " + std::to_string(total) +
                      ")");
    }
  }

  const MessageSpace& space() const noexcept { return *space_; }
  const SpacePtr& space_ptr() const noexcept { return space_; }
  std::size_t size() const noexcept { return masses_.size(); }
  double operator[](std::size_t m) const { return masses_[m]; }
  const std::vector<double>& masses() const noexcept { return masses_; }

  // Mass times quadrature weight: the probability of message m.
  double probability(std::size_t m) const {
    return masses_[m] * space_->weight(m);
  }

 private:
  SpacePtr space_;
  std::vector<double> masses_;
};

inline bool same_space(const Pmf& a, const Pmf& b) {
  return a.space_ptr() == b.space_ptr() || a.space() == b.space();
}

inline void require_same_space(const Pmf& a, const Pmf& b) {
  if (!same_space(a, b)) {
    throw Error(ErrorKind::kSpaceMismatch,
                "distributions live on different message spaces");
  }
}

inline Pmf normalize(const std::vector<double>& raw, SpacePtr space) {
  if (!space) throw Error(ErrorKind::kInvalidArgument, "null message space");
  if (raw.size() != space->size()) {
    throw Error(ErrorKind::kSpaceMismatch,
                "vector does not align with the message space");
  }
  double total = 0.0;
  for (std::size_t m = 0; m < raw.size(); ++m) {
    if (!std::isfinite(raw[m])) {
      throw Error(ErrorKind::kInvalidArgument, "non-finite entry");
    }
    if (raw[m] < 0.0) throw Error(ErrorKind::kNegativeMass, "negative entry");
    total += raw[m] * space->weight(m);
  }
  if (total <= 0.0) throw Error(ErrorKind::kAllZero, "every entry is zero");
  std::vector<double> masses(raw.size());
  for (std::size_t m = 0; m < raw.size(); ++m) masses[m] = raw[m] / total;
  return Pmf(std::move(space), std::move(masses));
}

// KL(p || q) in nats with 0 ln 0 = 0.
inline double kl_divergence(const Pmf& p, const Pmf& q) {
  require_same_space(p, q);
  double sum = 0.0;
  for (std::size_t m = 0; m < p.size(); ++m) {
    if (p[m] == 0.0) continue;
    if (q[m] == 0.0) {
      throw Error(ErrorKind::kSupportViolation,
                  "p has mass where q has none (message '" +
                      p.space().label(m) + "')");
    }
    sum += p.probability(m) * std::log(p[m] / q[m]);
  }
  // Rounding can leave a tiny negative value for p == q.
  return sum < 0.0 ? 0.0 : sum;
}

struct LikelihoodRatio {
  std::vector<double> values;  // f1/f0, +inf where only f1 charges m
  std::vector<bool> dead;      // zero under both hypotheses

  std::size_t size() const noexcept { return values.size(); }
  bool live(std::size_t m) const { return !dead[m]; }
};

inline LikelihoodRatio likelihood_ratio(const Pmf& f1, const Pmf& f0) {
  require_same_space(f1, f0);
  LikelihoodRatio lr;
  lr.values.resize(f1.size());
  lr.dead.resize(f1.size());
  for (std::size_t m = 0; m < f1.size(); ++m) {
    lr.dead[m] = f0[m] == 0.0 && f1[m] == 0.0;
    if (lr.dead[m]) {
      lr.values[m] = std::numeric_limits<double>::quiet_NaN();
    } else if (f0[m] == 0.0) {
      lr.values[m] = std::numeric_limits<double>::infinity();
    } else {
      lr.values[m] = f1[m] / f0[m];
    }
  }
  return lr;
}

inline std::vector<std::size_t> live_messages(const Pmf& f0, const Pmf& f1) {
  std::vector<std::size_t> live;
  for (std::size_t m = 0; m < f0.size(); ++m) {
    if (f0[m] > 0.0 || f1[m] > 0.0) live.push_back(m);
  }
  return live;
}

inline void require_common_support(const Pmf& f0, const Pmf& f1) {
  require_same_space(f0, f1);
  for (std::size_t m = 0; m < f0.size(); ++m) {
    if ((f0[m] > 0.0) != (f1[m] > 0.0)) {
      throw Error(ErrorKind::kSupportMismatch,
                  "f0 and f1 differ in support at message '" +
                      f0.space().label(m) + "'");
    }
  }
}

// Sum of m -> weights[m] * g(m) probabilities.
template <typename Weights>
double weighted_total(const Weights& coefficients, const Pmf& g) {
  double sum = 0.0;
  for (std::size_t m = 0; m < g.size(); ++m) {
    sum += coefficients[m] * g.probability(m);
  }
  return sum;
}

}  // namespace npgame

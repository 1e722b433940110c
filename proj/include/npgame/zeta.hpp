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

// The balance equation G(zeta) = 0 that pins down the hybrid equilibrium.
//
// For a fixed assignment of messages to regions, G is
//   slope * zeta + power * zeta^(beta/(1+beta)) + offset
// with slope >= 0. Region assignments only change at finitely many
// breakpoints, so every root can be enumerated exactly: split the search
// interval at the breakpoints and at the one stationary point each piece can
// have, then bisect every monotone piece whose ends differ in sign.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "npgame/error.hpp"
#include "npgame/neyman_pearson.hpp"
#include "npgame/penalty.hpp"
#include "npgame/pmf.hpp"

namespace npgame {

inline constexpr double kZetaResidualTolerance = 1e-10;

// Where to look for zeta.
enum class ZetaSearch {
  kAssumptionBracket,  // [sup f0/f1, e^{1/lambda} sup f0/f1]
  kPositiveAxis,       // (0, inf)
};

struct ZetaBracket {
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
};

struct ZetaSolution {
  double zeta = 0.0;
  RegionPartition regions;
  double residual = 0.0;
  std::vector<double> roots;  // every root found, ascending
  std::size_t jump_crossings = 0;
  ZetaBracket bracket;

  std::size_t root_count() const noexcept { return roots.size(); }
};

namespace detail {

inline constexpr double kBoundaryTolerance = 1e-13;

struct SegmentLaw {
  double slope = 0.0;
  double power = 0.0;
  double exponent = 0.0;
  double offset = 0.0;

  double operator()(double z) const {
    const double p = power != 0.0 ? power * std::pow(z, exponent) : 0.0;
    return slope * z + p + offset;
  }

  // Where the derivative vanishes, if anywhere on (0, inf).
  double stationary_point() const {
    if (slope == 0.0 || power == 0.0) return std::nan("");
    const double ratio = -slope / (power * exponent);
    if (!(ratio > 0.0)) return std::nan("");
    return std::pow(ratio, 1.0 / (exponent - 1.0));
  }

  // Sign of the law as zeta -> inf.
  int sign_at_infinity() const {
    if (slope > 0.0) return 1;
    if (power != 0.0) return power > 0.0 ? 1 : -1;
    return offset > 0.0 ? 1 : (offset < 0.0 ? -1 : 0);
  }
};

inline int sign_of(double x) { return x > 0.0 ? 1 : (x < 0.0 ? -1 : 0); }

// G for one (beta, lambda) pair. With an empty `fixed_rejection`, M1 is the
// threshold set {zeta * LR > e^{1/lambda}}; otherwise M1 is the given set and
// the remaining live messages split into M0 / M* at zeta * LR = 1.
class ZetaEquation {
 public:
  ZetaEquation(const Pmf& f0, const Pmf& f1, double beta, Penalty lambda,
               std::vector<bool> fixed_rejection = {})
      : f0_(f0),
        f1_(f1),
        lr_(likelihood_ratio(f1, f0)),
        beta_(beta),
        discount_(lambda.rejection_discount()),
        upper_(std::exp(1.0 / lambda.value())),
        exponent_(beta / (1.0 + beta)),
        fixed_(std::move(fixed_rejection)) {
    live_ = live_messages(f0, f1);
  }

  double beta() const noexcept { return beta_; }
  double discount() const noexcept { return discount_; }
  double upper_factor() const noexcept { return upper_; }
  double exponent() const noexcept { return exponent_; }
  bool fixed() const noexcept { return !fixed_.empty(); }
  const LikelihoodRatio& lr() const noexcept { return lr_; }
  const std::vector<std::size_t>& live() const noexcept { return live_; }

  double sup_inverse_ratio() const {
    double s = 0.0;
    for (std::size_t m : live_) s = std::max(s, 1.0 / lr_.values[m]);
    return s;
  }

  std::vector<Region> classify(double zeta) const {
    std::vector<Region> tags(f0_.size(), Region::kDead);
    for (std::size_t m : live_) {
      const double t = zeta * lr_.values[m];
      if (fixed() && fixed_[m]) {
        tags[m] = Region::kRejection;
      } else if (t < 1.0 - kBoundaryTolerance) {
        tags[m] = Region::kAcceptance;
      } else if (!fixed() && t > upper_ * (1.0 + kBoundaryTolerance)) {
        tags[m] = Region::kRejection;
      } else {
        tags[m] = Region::kUncertainty;
      }
    }
    return tags;
  }

  SegmentLaw law(const std::vector<Region>& tags) const {
    double f1_accept = 0.0, f1_reject = 0.0, f0_strict = 0.0, boundary = 0.0;
    for (std::size_t m : live_) {
      const double p0 = f0_.probability(m);
      const double p1 = f1_.probability(m);
      switch (tags[m]) {
        case Region::kAcceptance:
          f1_accept += p1;
          f0_strict += p0;
          break;
        case Region::kRejection:
          f1_reject += p1;
          f0_strict += p0;
          break;
        case Region::kUncertainty:
          boundary += p1 * std::pow(lr_.values[m], -1.0 / (1.0 + beta_));
          break;
        case Region::kDead:
          break;
      }
    }
    SegmentLaw law;
    law.slope = beta_ * (f1_accept + discount_ * f1_reject);
    law.power = (beta_ - 1.0) * boundary;
    law.exponent = exponent_;
    law.offset = -f0_strict;
    return law;
  }

  double residual(double zeta) const { return law(classify(zeta))(zeta); }

  // Zeta values where some message changes region, ascending.
  std::vector<double> breakpoints() const {
    std::vector<double> points;
    for (std::size_t m : live_) {
      if (fixed() && fixed_[m]) continue;
      const double lower = 1.0 / lr_.values[m];
      points.push_back(lower);
      if (!fixed()) points.push_back(upper_ * lower);
    }
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    return points;
  }

  // Breakpoints where G jumps (a message enters M1 from M*).
  std::vector<double> jump_points() const {
    std::vector<double> points;
    if (fixed()) return points;
    for (std::size_t m : live_) points.push_back(upper_ / lr_.values[m]);
    std::sort(points.begin(), points.end());
    return points;
  }

 private:
  Pmf f0_;
  Pmf f1_;
  LikelihoodRatio lr_;
  std::vector<std::size_t> live_;
  double beta_;
  double discount_;
  double upper_;
  double exponent_;
  std::vector<bool> fixed_;
};

// Bisection down to adjacent doubles on a piece where law(x), law(y) differ
// in sign.
template <typename Law>
double bisect_to_precision(const Law& law, double x, double y) {
  double fx = law(x);
  for (int iter = 0; iter < 4000; ++iter) {
    const double mid = x + 0.5 * (y - x);
    if (!(mid > x && mid < y)) break;
    const double fm = law(mid);
    if (fm == 0.0) return mid;
    if (sign_of(fm) == sign_of(fx)) {
      x = mid;
      fx = fm;
    } else {
      y = mid;
    }
  }
  return std::abs(law(x)) <= std::abs(law(y)) ? x : y;
}

struct RootEnumeration {
  std::vector<double> roots;
  std::size_t jump_crossings = 0;
};

inline void add_root(std::vector<double>& roots, double z) {
  for (double r : roots) {
    if (std::abs(r - z) <= 1e-12 * std::max(std::abs(r), std::abs(z))) return;
  }
  roots.push_back(z);
}

// All zeros of G on [lo, hi]; lo may be 0 (open end) and hi may be inf.
inline RootEnumeration enumerate_roots(const ZetaEquation& eq, double lo,
                                       double hi) {
  std::vector<double> points;
  if (lo > 0.0) points.push_back(lo);
  for (double b : eq.breakpoints()) {
    if (b > lo && b < hi) points.push_back(b);
  }
  if (std::isfinite(hi)) points.push_back(hi);

  RootEnumeration out;
  for (double p : points) {
    if (std::abs(eq.residual(p)) < kZetaResidualTolerance) {
      add_root(out.roots, p);
    }
  }

  // Segment ends, with 0 and inf standing for open ends.
  std::vector<double> ends;
  ends.push_back(lo > 0.0 ? lo : 0.0);
  for (double p : points) {
    if (p > ends.back()) ends.push_back(p);
  }
  if (!std::isfinite(hi)) ends.push_back(hi);

  for (std::size_t s = 0; s + 1 < ends.size(); ++s) {
    const double a = ends[s];
    const double b = ends[s + 1];
    double mid;
    if (a == 0.0 && std::isinf(b)) {
      mid = 1.0;
    } else if (a == 0.0) {
      mid = 0.5 * b;
    } else if (std::isinf(b)) {
      mid = 2.0 * a;
    } else {
      mid = std::sqrt(a * b);
    }
    const SegmentLaw law = eq.law(eq.classify(mid));

    std::vector<double> cuts{a};
    const double stationary = law.stationary_point();
    if (stationary > a && stationary < b) cuts.push_back(stationary);
    cuts.push_back(b);

    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const double x = cuts[k];
      double y = cuts[k + 1];
      const int sx = sign_of(law(x));
      int sy;
      if (std::isinf(y)) {
        sy = law.sign_at_infinity();
        if (sx != 0 && sy != 0 && sx != sy) {
          y = std::max(1.0, 2.0 * x);
          while (sign_of(law(y)) != sy && y < 1e300) y *= 2.0;
        }
      } else {
        sy = sign_of(law(y));
      }
      if (sx != 0 && sy != 0 && sx != sy) {
        const double root = bisect_to_precision(law, x, y);
        if (std::abs(eq.residual(root)) < kZetaResidualTolerance) {
          add_root(out.roots, root);
        }
      }
    }
  }

  for (double j : eq.jump_points()) {
    if (!(j > lo && j < hi)) continue;
    const double below = eq.law(eq.classify(j * (1.0 - 1e-9)))(j);
    const double above = eq.law(eq.classify(j * (1.0 + 1e-9)))(j);
    if (sign_of(below) * sign_of(above) < 0) ++out.jump_crossings;
  }

  std::sort(out.roots.begin(), out.roots.end());
  return out;
}

inline void validate_zeta_inputs(const Pmf& f0, const Pmf& f1, double beta,
                                 Penalty lambda) {
  require_common_support(f0, f1);
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw Error(ErrorKind::kInvalidArgument, "beta must be positive and finite");
  }
  if (!lambda.is_finite_positive()) {
    throw Error(ErrorKind::kInvalidArgument,
                "the zeta equation needs 0 < lambda < inf");
  }
}

}  // namespace detail

inline ZetaBracket zeta_bracket(const Pmf& f0, const Pmf& f1, Penalty lambda) {
  const detail::ZetaEquation eq(f0, f1, 1.0, lambda);
  const double s = eq.sup_inverse_ratio();
  return ZetaBracket{s, eq.upper_factor() * s};
}

// G(zeta) with the threshold regions.
inline double zeta_residual(const Pmf& f0, const Pmf& f1, double beta,
                            Penalty lambda, double zeta) {
  detail::validate_zeta_inputs(f0, f1, beta, lambda);
  return detail::ZetaEquation(f0, f1, beta, lambda).residual(zeta);
}

inline std::vector<double> zeta_breakpoints(const Pmf& f0, const Pmf& f1,
                                            double beta, Penalty lambda) {
  detail::validate_zeta_inputs(f0, f1, beta, lambda);
  return detail::ZetaEquation(f0, f1, beta, lambda).breakpoints();
}

// Smallest zero of G in the requested search range, with the threshold
// regions it induces. Throws NoRoot when G has no zero there.
inline ZetaSolution solve_zeta(
    const Pmf& f0, const Pmf& f1, double beta, Penalty lambda,
    ZetaSearch search = ZetaSearch::kAssumptionBracket) {
  detail::validate_zeta_inputs(f0, f1, beta, lambda);
  const detail::ZetaEquation eq(f0, f1, beta, lambda);

  ZetaBracket bracket;
  if (search == ZetaSearch::kAssumptionBracket) {
    const double s = eq.sup_inverse_ratio();
    bracket = ZetaBracket{s, eq.upper_factor() * s};
  }
  auto found = detail::enumerate_roots(eq, bracket.lo, bracket.hi);
  if (found.roots.empty()) {
    std::ostringstream msg;
    msg.precision(12);
    msg << "G(zeta) has no zero on [" << bracket.lo << ", " << bracket.hi
        << "] for beta=" << beta << ", lambda=" << lambda.value();
    throw Error(ErrorKind::kNoRoot, msg.str());
  }

  ZetaSolution sol;
  sol.zeta = found.roots.front();
  sol.regions = RegionPartition(eq.classify(sol.zeta));
  sol.residual = eq.residual(sol.zeta);
  sol.roots = std::move(found.roots);
  sol.jump_crossings = found.jump_crossings;
  sol.bracket = bracket;
  return sol;
}

}  // namespace npgame

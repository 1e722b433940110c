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
#include <limits>
#include <string>

#include "npgame/error.hpp"

namespace npgame {

// Weight lambda of the attacker's KL lying cost. Zero and infinity are legal
// values with their own closed forms, so they are queried explicitly instead
// of being approached numerically.
class Penalty {
 public:
  explicit Penalty(double value) : value_(value) {
    if (std::isnan(value) || value < 0.0) {
      throw Error(ErrorKind::kInvalidArgument,
                  "penalty weight must be >= 0 or infinite");
    }
  }

  static Penalty infinite() {
    return Penalty(std::numeric_limits<double>::infinity());
  }

  double value() const noexcept { return value_; }
  bool is_zero() const noexcept { return value_ == 0.0; }
  bool is_infinite() const noexcept { return std::isinf(value_); }
  bool is_finite_positive() const noexcept {
    return !is_zero() && !is_infinite();
  }

  // e^{-1/lambda}: factor by which the attacker scales mass on rejected
  // messages.
  double rejection_discount() const {
    if (is_zero()) return 0.0;
    if (is_infinite()) return 1.0;
    return std::exp(-1.0 / value_);
  }

  std::string str() const {
    return is_infinite() ? std::string("inf") : std::to_string(value_);
  }

  bool operator==(const Penalty&) const = default;

 private:
  double value_;
};

}  // namespace npgame

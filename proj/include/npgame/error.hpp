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

#include <stdexcept>
#include <string>
#include <string_view>

namespace npgame {

enum class ErrorKind {
  kAllZero,
  kNegativeMass,
  kSupportViolation,
  kSupportMismatch,
  kSpaceMismatch,
  kInvalidAlpha,
  kInvalidPrior,
  kInvalidArgument,
  kNoRoot,
  kCapExceeded,
  kSpaceTooLarge,
  kConfigInvalid,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kAllZero: return "AllZero";
    case ErrorKind::kNegativeMass: return "NegativeMass";
    case ErrorKind::kSupportViolation: return "SupportViolation";
    case ErrorKind::kSupportMismatch: return "SupportMismatch";
    case ErrorKind::kSpaceMismatch: return "SpaceMismatch";
    case ErrorKind::kInvalidAlpha: return "InvalidAlpha";
    case ErrorKind::kInvalidPrior: return "InvalidPrior";
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kNoRoot: return "NoRoot";
    case ErrorKind::kCapExceeded: return "CapExceeded";
    case ErrorKind::kSpaceTooLarge: return "SpaceTooLarge";
    case ErrorKind::kConfigInvalid: return "ConfigInvalid";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace npgame

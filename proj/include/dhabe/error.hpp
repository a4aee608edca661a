// Copyright 2026 The D-HABE Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dhabe {

enum class ErrorKind {
  kInvalidArgument,
  kSyntax,
  kThreshold,
  kPolicyNotSatisfied,
  kEpochMismatch,
  kAuthenticationFailed,
  kMergeRefused,
  kEmptyAttributes,
  kFormat,
  kUndefinedLabel,
  kTrustDenied,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid argument";
    case ErrorKind::kSyntax: return "syntax error";
    case ErrorKind::kThreshold: return "threshold out of range";
    case ErrorKind::kPolicyNotSatisfied: return "policy not satisfied";
    case ErrorKind::kEpochMismatch: return "epoch mismatch";
    case ErrorKind::kAuthenticationFailed: return "authentication failed";
    case ErrorKind::kMergeRefused: return "merge refused";
    case ErrorKind::kEmptyAttributes: return "empty attribute set";
    case ErrorKind::kFormat: return "format error";
    case ErrorKind::kUndefinedLabel: return "undefined label";
    case ErrorKind::kTrustDenied: return "trust-management denial";
  }
  return "unknown error";
}

// All library failures are reported as dhabe::Error; kind() drives the CLI
// exit code and the harness outcome tags.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail)
      : std::runtime_error(std::string(to_string(kind)) +
                           (detail.empty() ? "" : ": " + detail)),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Parse failure carrying a location. For policy text `position` is a
// 0-based character offset; for line-oriented formats it is a 1-based line.
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& detail, std::size_t position)
      : Error(ErrorKind::kSyntax, detail), position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace dhabe

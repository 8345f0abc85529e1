// Copyright 2026 The coldrec Authors
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

namespace coldrec {

// Error taxonomy shared by every module. Categories map onto process exit
// codes so failures stay machine-parsable at the CLI boundary.
enum class ErrorCategory {
  kConfig,      // invalid knobs or impossible requests
  kParse,       // malformed input files
  kIntegrity,   // well-formed but inconsistent data (hash/id mismatches)
  kNumeric,     // divergence, non-finite values
  kDegenerate,  // inputs that make an operation meaningless
};

inline int exit_code(ErrorCategory cat) {
  switch (cat) {
    case ErrorCategory::kConfig:
      return 2;
    case ErrorCategory::kParse:
    case ErrorCategory::kIntegrity:
      return 3;
    case ErrorCategory::kNumeric:
      return 4;
    case ErrorCategory::kDegenerate:
      return 5;
  }
  return 1;
}

inline const char* category_name(ErrorCategory cat) {
  switch (cat) {
    case ErrorCategory::kConfig:
      return "config";
    case ErrorCategory::kParse:
      return "parse";
    case ErrorCategory::kIntegrity:
      return "integrity";
    case ErrorCategory::kNumeric:
      return "numeric";
    case ErrorCategory::kDegenerate:
      return "degenerate";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory cat, const std::string& what)
      : std::runtime_error(what), category_(cat) {}

  ErrorCategory category() const { return category_; }

 private:
  ErrorCategory category_;
};

[[noreturn]] inline void fail(ErrorCategory cat, const std::string& what) {
  throw Error(cat, what);
}

}  // namespace coldrec

// Copyright 2026 The dsm-nas Authors.
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

#ifndef DSM_ERRORS_HPP
#define DSM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace dsm {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad flags, bad config files, out-of-range settings.
struct ConfigError : Error {
  using Error::Error;
};

// Malformed or inconsistent input data (benchmark files, architecture text).
struct DataError : Error {
  using Error::Error;
};

// Architecture/spec mismatch (wrong length, illegal code).
struct EncodingError : DataError {
  using DataError::DataError;
};

// Illegal modification step.
struct ModificationError : DataError {
  using DataError::DataError;
};

// Architecture not present in a tabular benchmark.
struct MissingEntryError : DataError {
  using DataError::DataError;
};

// Query budget exhausted. Searches catch this and terminate cleanly.
struct BudgetError : Error {
  using Error::Error;
};

// Enumeration or generation would exceed the tractability guard.
struct SizeGuardError : Error {
  using Error::Error;
};

// Numerical failure inside the differentiation engine (NaN/Inf, bad shapes).
struct NumericError : Error {
  using Error::Error;
};

}  // namespace dsm

#endif  // DSM_ERRORS_HPP

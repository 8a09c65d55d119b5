// Copyright the pgt authors
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

namespace pgt {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rejected inputs: malformed matrices, parameter ranges, schema violations,
/// violated preconditions. CLI maps this to exit code 2.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Numeric validity failures discovered mid-computation (non-finite values,
/// results outside tolerated ranges). CLI maps this to exit code 3.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A measurement branch with probability below the degeneracy floor was
/// requested explicitly.
class DegenerateBranchError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace pgt

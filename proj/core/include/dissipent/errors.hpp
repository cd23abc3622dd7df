// Copyright 2026 The dissipent Authors
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
#include <utility>

namespace dissipent {

/// Bad input: a parameter, a configuration key or a structural precondition.
/// `key()` names the offending field when there is one.
class ParameterError : public std::invalid_argument {
 public:
  explicit ParameterError(const std::string& message, std::string key = {})
      : std::invalid_argument(message), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// A computation could not be carried out: singular block, non-convergence,
/// integrator blow-up, degenerate steady manifold.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A physical invariant (trace, Hermiticity, positivity) was breached.
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dissipent

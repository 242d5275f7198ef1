// Copyright 2026 The signmom Authors. All Rights Reserved.
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
// =============================================================================

#pragma once

#include <stdexcept>
#include <string>

namespace signmom {

/// Caller broke a documented precondition (dimension mismatch, bad argument).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A value fell outside the range an operator is defined on, e.g. the
/// unbiased sign operator receiving ||v||_inf > R.
class RangeViolation : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A modelling assumption (bounded gradients, smoothness, ...) does not hold
/// at the point where it was needed.
class AssumptionViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed fixture / config document.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

[[noreturn]] inline void fail_contract(const std::string& what) {
  throw ContractViolation(what);
}

}  // namespace detail

#define SIGNMOM_REQUIRE(cond, msg)                    \
  do {                                                \
    if (!(cond)) ::signmom::detail::fail_contract(msg); \
  } while (0)

}  // namespace signmom

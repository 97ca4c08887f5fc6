// Copyright 2026 The mbqp Authors
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

#ifndef MBQP_ERROR_HPP_
#define MBQP_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace mbqp {

// Invalid generator or solver options.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed instance file. key() names the offending JSON key.
class FormatError : public std::runtime_error {
 public:
  FormatError(std::string key, const std::string& what)
      : std::runtime_error(key.empty() ? what : key + ": " + what),
        key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

// A point that is not on the integer lattice of the centered problem.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A continuous solution that is too far from the lattice to be restored.
class RoundingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Objective of a model handed to branch-and-bound is not convex.
class NonconvexError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Oracle refused because the box has too many points.
class CapacityError : public std::runtime_error {
 public:
  CapacityError(const std::string& what, double required)
      : std::runtime_error(what), required_(required) {}
  double required_cap() const { return required_; }

 private:
  double required_;
};

// Benchmark solution disagreed with the oracle or failed a sanity check.
class VerificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mbqp

#endif  // MBQP_ERROR_HPP_

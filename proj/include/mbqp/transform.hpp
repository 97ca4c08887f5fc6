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

#ifndef MBQP_TRANSFORM_HPP_
#define MBQP_TRANSFORM_HPP_

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "mbqp/instance.hpp"

namespace mbqp {

// The instance rewritten around the box midpoint t. Coordinates whose
// midpoint is an integer (set I) keep unit scale, x~ = x - t, and take values
// in {-m..m}. The others (set J) are doubled, x~ = 2x - (u + l), so x~ runs
// over the odd integers in [-m, m].
//
//   x = S x~ + t,  S = Diag(s),  s_i = 1 on I and 1/2 on J
//   x'Qx + c'x = x~'Qt x~ + ct'x~ + k0
//   Qt = S Q S,  ct = S (2 Q t + c),  k0 = t'Qt + c't
struct CenteredProblem {
  int n = 0;
  std::vector<bool> in_I;
  std::vector<int> I;
  std::vector<int> J;
  IntVector m;
  Eigen::VectorXd s;
  Eigen::VectorXd t;
  Eigen::MatrixXd Qt;
  Eigen::VectorXd ct;
  double k0 = 0.0;
  IntVector l;
  IntVector u;

  // x~'Qt x~ + ct'x~ + k0, i.e. the original objective.
  double objective(std::span<const double> xt) const;
  double objective(std::span<const std::int64_t> xt) const;

  bool on_lattice(int i, std::int64_t value) const;
  // Number of admissible values of x~_i (= u_i - l_i + 1).
  std::int64_t lattice_size(int i) const { return u[i] - l[i] + 1; }
};

CenteredProblem center(const Instance& inst);

// Exact forward map of an integer box point.
IntVector to_centered(const CenteredProblem& cp, std::span<const std::int64_t> x);

// Inverse map x = S x~ + t. Throws RoundingError when some x~_i is farther
// than tol from its lattice.
IntVector restore(const CenteredProblem& cp, std::span<const double> xt,
                  double tol = 1e-6);

// Closest lattice point per coordinate, clamped to [-m, m].
IntVector nearest_lattice(const CenteredProblem& cp, std::span<const double> xt);

}  // namespace mbqp

#endif  // MBQP_TRANSFORM_HPP_

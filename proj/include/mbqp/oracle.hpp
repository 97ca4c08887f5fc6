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

#ifndef MBQP_ORACLE_HPP_
#define MBQP_ORACLE_HPP_

#include <cstdint>
#include <vector>

#include "mbqp/instance.hpp"

namespace mbqp {

inline constexpr double kDefaultPointCap = 5e6;

struct OracleResult {
  double obj = 0.0;
  IntVector argmin;
  std::uint64_t count = 0;
};

// Walks every integer point of a box so that consecutive points differ in
// one coordinate by +-1 (reflected mixed-radix Gray order), keeping Qx and
// the objective up to date in O(n) per step.
class GrayWalk {
 public:
  // Walks coordinates first..n-1 with coordinate `first - 1` and below held
  // at their starting values in `start` (used to split work by the leading
  // coordinate).
  GrayWalk(const Instance& inst, IntVector start, int first = 0);

  const IntVector& point() const { return x_; }
  double objective() const { return obj_; }
  // Advances to the next point; false once every point has been visited.
  bool next();
  // Recomputes Qx and the objective from scratch.
  void resync();

 private:
  const Instance& inst_;
  IntVector x_;
  std::vector<int> dir_;
  std::vector<double> qx_;
  std::vector<double> xd_;
  double obj_ = 0.0;
  int first_ = 0;
};

// Exhaustive minimum over the box. Ties resolve to the lexicographically
// smallest minimizer. Throws CapacityError if the box holds more than
// point_cap points.
OracleResult enumerate_min(const Instance& inst, double point_cap = kDefaultPointCap,
                           int threads = 1);

}  // namespace mbqp

#endif  // MBQP_ORACLE_HPP_

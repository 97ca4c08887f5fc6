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

#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "mbqp/error.hpp"
#include "mbqp/oracle.hpp"
#include "test_util.hpp"

namespace mbqp {
namespace {

double direct(const Instance& inst, const IntVector& x) {
  double v = 0.0;
  for (int i = 0; i < inst.n; ++i) {
    v += inst.c(i) * static_cast<double>(x[i]);
    for (int j = 0; j < inst.n; ++j)
      v += inst.Q(i, j) * static_cast<double>(x[i]) * static_cast<double>(x[j]);
  }
  return v;
}

TEST(EnumerateMin, LinearObjective) {
  Eigen::VectorXd c(2);
  c << 1.0, -1.0;
  const Instance inst = make_instance(Eigen::MatrixXd::Zero(2, 2), c, {-1, -1}, {1, 1});
  const OracleResult r = enumerate_min(inst);
  EXPECT_DOUBLE_EQ(r.obj, -2.0);
  EXPECT_EQ(r.argmin, (IntVector{-1, 1}));
  EXPECT_EQ(r.count, 9u);
}

TEST(EnumerateMin, ConcaveTiesGoLexicographic) {
  const Instance inst = make_instance(-Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Zero(2),
                                      {-1, -1}, {1, 1});
  for (int threads : {1, 2, 3}) {
    const OracleResult r = enumerate_min(inst, kDefaultPointCap, threads);
    EXPECT_DOUBLE_EQ(r.obj, -2.0);
    EXPECT_EQ(r.argmin, (IntVector{-1, -1}));
  }
}

TEST(EnumerateMin, ConvexSeparable) {
  const Instance inst =
      make_instance(Eigen::MatrixXd::Ones(1, 1), Eigen::VectorXd::Zero(1), {-5}, {5});
  const OracleResult r = enumerate_min(inst);
  EXPECT_DOUBLE_EQ(r.obj, 0.0);
  EXPECT_EQ(r.argmin, (IntVector{0}));
  EXPECT_EQ(r.count, 11u);
}

TEST(EnumerateMin, CapacityRefusal) {
  const Instance inst = generate_instance(15, 0.5, 1);  // 3^15 > 5e6
  try {
    enumerate_min(inst);
    FAIL() << "expected CapacityError";
  } catch (const CapacityError& e) {
    EXPECT_DOUBLE_EQ(e.required_cap(), std::pow(3.0, 15));
  }
  EXPECT_NO_THROW(enumerate_min(generate_instance(4, 0.5, 1), 81.0));
  EXPECT_THROW(enumerate_min(generate_instance(4, 0.5, 1), 80.0), CapacityError);
}

TEST(EnumerateMin, MatchesOdometer) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const int n = 2 + static_cast<int>(seed % 6);
    const Instance inst = seed % 3 == 0 ? generate_instance(std::min(n, 4), 0.5, seed,
                                                            BoxProfile::pm5())
                                        : generate_instance(n, 0.5, seed);
    const OracleResult r = enumerate_min(inst);
    const testing::BruteForce bf = testing::brute_force(inst);
    EXPECT_NEAR(r.obj, bf.obj, 1e-10 * (1.0 + std::abs(bf.obj)));
    EXPECT_NEAR(direct(inst, r.argmin), r.obj, 1e-12 * (1.0 + std::abs(r.obj)));
    EXPECT_DOUBLE_EQ(r.count, inst.box_size());
  }
}

TEST(EnumerateMin, ThreadedMatchesSerial) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Instance inst = generate_instance(4, 0.5, seed, BoxProfile::pm5());
    const OracleResult a = enumerate_min(inst, kDefaultPointCap, 1);
    const OracleResult b = enumerate_min(inst, kDefaultPointCap, 4);
    EXPECT_EQ(a.argmin, b.argmin);
    EXPECT_EQ(a.obj, b.obj);
    EXPECT_EQ(a.count, b.count);
  }
}

TEST(EnumerateMin, SymmetricInstances) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Instance inst = generate_instance(5, 0.6, seed);
    inst.c.setZero();
    const OracleResult r = enumerate_min(inst);
    IntVector neg = r.argmin;
    for (auto& v : neg) v = -v;
    EXPECT_NEAR(direct(inst, neg), r.obj, 1e-12 * (1.0 + std::abs(r.obj)));
    // Among the two mirror images the lexicographically smaller is reported.
    EXPECT_LE(r.argmin, neg);
  }
}

TEST(GrayWalk, IncrementalMatchesDirect) {
  const Instance inst = generate_instance(6, 0.5, 11, BoxProfile::pm5());
  GrayWalk walk(inst, inst.l);
  Xoshiro256 rng(3);
  int checks = 0;
  std::uint64_t steps = 0;
  const double total = inst.box_size();
  do {
    ++steps;
    // About 1000 random checkpoints over the walk.
    if (rng.uniform(0.0, 1.0) < 1000.0 / total) {
      EXPECT_NEAR(walk.objective(), direct(inst, walk.point()),
                  1e-10 * (1.0 + std::abs(walk.objective())));
      ++checks;
    }
  } while (walk.next());
  EXPECT_EQ(static_cast<double>(steps), total);
  EXPECT_GT(checks, 500);
}

TEST(GrayWalk, SingleCoordinateSteps) {
  const Instance inst = generate_instance(3, 0.5, 2);
  GrayWalk walk(inst, inst.l);
  IntVector prev = walk.point();
  std::set<IntVector> seen{prev};
  while (walk.next()) {
    const IntVector& x = walk.point();
    int changed = 0;
    for (int i = 0; i < 3; ++i) {
      if (x[i] != prev[i]) {
        ++changed;
        EXPECT_EQ(std::abs(x[i] - prev[i]), 1);
      }
      EXPECT_GE(x[i], inst.l[i]);
      EXPECT_LE(x[i], inst.u[i]);
    }
    EXPECT_EQ(changed, 1);
    seen.insert(x);
    prev = x;
  }
  EXPECT_EQ(seen.size(), 27u);
}

}  // namespace
}  // namespace mbqp

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

#include "mbqp/error.hpp"
#include "mbqp/miqp.hpp"
#include "mbqp/sdp.hpp"
#include "test_util.hpp"

namespace mbqp {
namespace {

struct Built {
  CenteredProblem cp;
  ReformModel model;
  ThetaChoice theta;
};

Built build(const Instance& inst, ThetaMethod method = ThetaMethod::kSdp) {
  CenteredProblem cp = center(inst);
  ThetaChoice th = select_theta(cp, method);
  ReformModel m = build_mbqp(cp, th.theta);
  return {std::move(cp), std::move(m), std::move(th)};
}

bool close(double a, double b) { return std::abs(a - b) <= 1e-6 * (1.0 + std::abs(b)); }

TEST(Solve, WorkedExample) {
  const Instance inst = make_instance(Eigen::MatrixXd::Constant(1, 1, -1.0),
                                      Eigen::VectorXd::Zero(1), {-1}, {1});
  const Built b = build(inst);
  const SolveResult r = solve(b.cp, b.model);
  EXPECT_EQ(r.status, SolveStatus::kOptimal);
  EXPECT_NEAR(r.obj, -1.0, 1e-9);
  EXPECT_EQ(r.nodes, 1);
  ASSERT_TRUE(r.x_best.has_value());
  EXPECT_EQ(std::abs((*r.x_best)[0]), 1);
  EXPECT_NEAR(r.root_bound, -1.0, 1e-6);
}

struct Case {
  int n_lo, n_hi;
  BoxProfile box;
  ThetaMethod method;
};

class SolveRandom : public ::testing::TestWithParam<Case> {};

TEST_P(SolveRandom, MatchesBruteForce) {
  const Case cs = GetParam();
  std::uint64_t seed = 100;
  for (int n = cs.n_lo; n <= cs.n_hi; ++n) {
    for (double p : {0.0, 0.3, 0.7, 1.0}) {
      const Instance inst = generate_instance(n, p, ++seed, cs.box);
      const Built b = build(inst, cs.method);
      const SolveResult r = solve(b.cp, b.model);
      const testing::BruteForce bf = testing::brute_force(inst);
      ASSERT_EQ(r.status, SolveStatus::kOptimal) << n << " " << p;
      EXPECT_TRUE(close(r.obj, bf.obj)) << r.obj << " vs " << bf.obj;
      ASSERT_TRUE(r.x_best.has_value());
      for (int i = 0; i < n; ++i) {
        EXPECT_GE((*r.x_best)[i], inst.l[i]);
        EXPECT_LE((*r.x_best)[i], inst.u[i]);
      }
      EXPECT_NEAR(inst.objective(*r.x_best), r.obj, 1e-9 * (1.0 + std::abs(r.obj)));
      EXPECT_LE(r.root_bound, bf.obj + 1e-6 * (1.0 + std::abs(bf.obj)));
    }
  }
}

INSTANTIATE_TEST_SUITE_P(
    Grid, SolveRandom,
    ::testing::Values(Case{2, 7, BoxProfile::ternary(), ThetaMethod::kSdp},
                      Case{2, 4, BoxProfile::pm5(), ThetaMethod::kSdp},
                      Case{2, 5, BoxProfile::ternary(), ThetaMethod::kEig},
                      Case{2, 3, BoxProfile{0, 4}, ThetaMethod::kSdp},
                      Case{2, 3, BoxProfile{-2, 1}, ThetaMethod::kEig}));

TEST(Solve, NaiveModelMatches) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const Instance inst = generate_instance(4, 0.5, seed, seed % 2 ? BoxProfile::ternary()
                                                                    : BoxProfile{-2, 2});
    const Built b = build(inst);
    const SolveResult r = solve(b.cp, build_naive(b.cp, b.theta.theta));
    ASSERT_EQ(r.status, SolveStatus::kOptimal);
    EXPECT_TRUE(close(r.obj, testing::brute_force(inst).obj));
  }
}

TEST(Solve, WithoutSignLinkCut) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const Instance inst = generate_instance(5, 0.6, seed);
    const CenteredProblem cp = center(inst);
    const ReformOptions ro{.sign_link_cut = false};
    const ThetaChoice th = select_theta(cp, ThetaMethod::kSdp, ro);
    const SolveResult r = solve(cp, build_mbqp(cp, th.theta, ro));
    ASSERT_EQ(r.status, SolveStatus::kOptimal);
    EXPECT_TRUE(close(r.obj, testing::brute_force(inst).obj));
  }
}

TEST(Solve, WarmBound) {
  const Instance inst = generate_instance(5, 0.6, 3);
  const Built b = build(inst);
  ASSERT_TRUE(b.theta.certificate.has_value());
  const double wb = warm_bound(b.model, *b.theta.certificate);
  EXPECT_NEAR(wb, b.theta.certificate->bound, 1e-12);
  SolveOptions opts;
  opts.initial_bound = wb;
  const SolveResult r = solve(b.cp, b.model, opts);
  ASSERT_EQ(r.status, SolveStatus::kOptimal);
  EXPECT_TRUE(close(r.obj, testing::brute_force(inst).obj));
  EXPECT_GE(r.root_bound, wb);

  const ReformModel other = build_mbqp(b.cp, b.theta.theta.array() + 0.5);
  EXPECT_THROW(warm_bound(other, *b.theta.certificate), ParameterError);
}

TEST(Solve, Deterministic) {
  const Instance inst = generate_instance(7, 0.5, 21);
  const Built b = build(inst);
  const SolveResult a = solve(b.cp, b.model);
  const SolveResult c = solve(b.cp, b.model);
  EXPECT_EQ(a.obj, c.obj);
  EXPECT_EQ(a.nodes, c.nodes);
  EXPECT_EQ(a.x_best, c.x_best);
}

TEST(Solve, NodeLimitReportsTimeLimit) {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const Instance inst = generate_instance(8, 0.5, seed);
    const Built b = build(inst, ThetaMethod::kEig);
    const SolveResult full = solve(b.cp, b.model);
    if (full.nodes < 3) continue;
    SolveOptions opts;
    opts.node_limit = 1;
    const SolveResult cut = solve(b.cp, b.model, opts);
    EXPECT_EQ(cut.status, SolveStatus::kTimeLimit);
    EXPECT_EQ(cut.nodes, 1);
    if (cut.x_best) EXPECT_GE(cut.obj, full.obj - 1e-9);
    return;
  }
  GTEST_SKIP() << "no instance needed branching";
}

TEST(Solve, ZeroTimeLimit) {
  const Built b = build(generate_instance(6, 0.5, 2));
  SolveOptions opts;
  opts.time_limit = 0.0;
  const SolveResult r = solve(b.cp, b.model, opts);
  EXPECT_EQ(r.status, SolveStatus::kTimeLimit);
}

TEST(Solve, RejectsNonconvexTheta) {
  const Instance inst = generate_instance(4, 1.0, 5);
  const CenteredProblem cp = center(inst);
  EXPECT_THROW(solve(cp, build_mbqp(cp, Eigen::VectorXd::Zero(4))), NonconvexError);
}

TEST(Solve, RejectsBadOptions) {
  const Built b = build(generate_instance(2, 0.5, 1));
  SolveOptions opts;
  opts.tol = 0.0;
  EXPECT_THROW(solve(b.cp, b.model, opts), ParameterError);
}

TEST(Solve, StatusNames) {
  EXPECT_EQ(solve_status_name(SolveStatus::kOptimal), "Optimal");
  EXPECT_EQ(solve_status_name(SolveStatus::kTimeLimit), "TimeLimit");
}

}  // namespace
}  // namespace mbqp

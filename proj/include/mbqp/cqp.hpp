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

#ifndef MBQP_CQP_HPP_
#define MBQP_CQP_HPP_

#include <Eigen/Dense>
#include <string_view>
#include <vector>

#include "mbqp/reform.hpp"

namespace mbqp {

// min x'Hx + g'x  s.t.  G x (<= | =) h,  lower <= x <= upper.
// Bounds may be infinite; lower == upper fixes a variable.
struct CqpProblem {
  Eigen::MatrixXd H;
  Eigen::VectorXd g;
  Eigen::MatrixXd G;
  Eigen::VectorXd h;
  std::vector<RowSense> sense;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  int num_vars() const { return static_cast<int>(g.size()); }
  int num_rows() const { return static_cast<int>(h.size()); }
};

enum class CqpStatus { kOptimal, kInfeasible, kUnbounded, kUnconverged };

std::string_view status_name(CqpStatus s);

struct CqpOptions {
  double tol = 1e-9;          // target for the scaled KKT residuals
  double accept_tol = 1e-8;   // still reported Optimal if the solve stalls here
  int max_iter = 100;
  bool check_convexity = true;
};

// Multipliers follow L = x'Hx + g'x + lambda'(Gx - h) + mu_u'(x - u)
// + mu_l'(l - x), so every inequality multiplier is nonnegative.
struct CqpSolution {
  CqpStatus status = CqpStatus::kUnconverged;
  Eigen::VectorXd x;
  double value = 0.0;
  Eigen::VectorXd row_duals;
  Eigen::VectorXd lower_duals;
  Eigen::VectorXd upper_duals;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double complementarity = 0.0;
  double kkt_residual = 0.0;
  int iterations = 0;
  // Infeasible only: y >= 0 on inequalities with G'y + y_u - y_l = 0 and
  // h'y + u'y_u - l'y_l = -1.
  Eigen::VectorXd farkas_rows;
  Eigen::VectorXd farkas_lower;
  Eigen::VectorXd farkas_upper;
};

CqpSolution solve_cqp(const CqpProblem& prob, const CqpOptions& opts = {});

// min_x of the Lagrangian at the returned multipliers; -infinity when the
// multipliers leave a direction of recession. Weak duality makes this a
// lower bound on the optimal value.
double lagrangian_dual_value(const CqpProblem& prob, const CqpSolution& sol);

// Scaled residual of an infeasibility certificate: max of
// |G'y + y_u - y_l|, negative parts of inequality multipliers, and
// h'y + u'y_u - l'y_l + 1 (zero for a normalized certificate).
double farkas_residual(const CqpProblem& prob, const CqpSolution& sol);

// Continuous relaxation of a model over (x~, w) with binaries boxed by
// [w_lower, w_upper].
CqpProblem make_relaxation(const ReformModel& model, const Eigen::VectorXd& w_lower,
                           const Eigen::VectorXd& w_upper);
CqpProblem make_relaxation(const ReformModel& model);

}  // namespace mbqp

#endif  // MBQP_CQP_HPP_

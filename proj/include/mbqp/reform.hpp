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

#ifndef MBQP_REFORM_HPP_
#define MBQP_REFORM_HPP_

#include <Eigen/Dense>
#include <array>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#include "mbqp/transform.hpp"

namespace mbqp {

enum class ModelKind { kMbqp, kOneHot };

enum class RowSense { kLessEqual, kEqual };

// Constraint families of the mixed-binary model, in row order within a
// variable block.
enum class RowFamily {
  kAbsLower,    // -sum lev*y <= x~
  kAbsUpper,    //  x~ <= sum lev*y
  kSignLink,    //  z <= sum y  (optional cut, I only)
  kLevelCount,  //  sum y <= 1  (I only)
  kOneHot,      //  sum y = 1   (J, and every variable of the one-hot model)
  kSignNeg,     //  sum lev*y - x~ <= 2 m z
  kSignPos,     //  sum lev*y + x~ <= 2 m (1 - z)
  kLevelLink,   //  x~ = sum v*y  (one-hot model)
};
inline constexpr int kRowFamilyCount = 8;

std::string_view family_name(RowFamily f);

// Binary variables are numbered 0..q-1; each original coordinate owns a
// contiguous block [y_begin, y_begin + y_count) followed by its sign binary.
struct VariableLayout {
  int n_x = 0;
  int q = 0;
  std::vector<int> y_begin;
  std::vector<int> y_count;
  std::vector<int> z_index;  // -1 when the model has no sign binaries
  // Per binary: owning coordinate, its level (k on I, 2k+1 on J, the signed
  // value in the one-hot model, 0 for z) and whether it is a sign binary.
  std::vector<int> owner;
  std::vector<std::int64_t> level;
  std::vector<bool> is_sign;
};

struct ReformOptions {
  // The redundant z_i <= sum_k y_ik rows; they cut off y = 0, z = 1.
  bool sign_link_cut = true;
};

// A point of the mixed-binary model: continuous x~ and binaries w = (y, z).
struct ModelPoint {
  Eigen::VectorXd x;
  Eigen::VectorXd w;
};

// Linearly constrained mixed-binary quadratic model
//   min x~'(Qt + Diag(theta))x~ + ct'x~ - L(theta)'w + k0
//   s.t. A x~ + B w (<= | =) a,  w binary.
// L(theta)_j = theta_coef_j * theta_{owner(j)}; on every lattice point and
// its lift the theta terms cancel.
struct ReformModel {
  ModelKind kind = ModelKind::kMbqp;
  VariableLayout layout;
  std::vector<bool> in_I;
  IntVector m;
  Eigen::MatrixXd Qt;
  Eigen::VectorXd ct;
  double k0 = 0.0;
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::VectorXd a;
  std::vector<RowSense> sense;
  std::vector<RowFamily> family;
  std::vector<int> row_var;
  Eigen::VectorXd theta_coef;
  Eigen::VectorXd theta;
  bool sign_link_cut = true;

  int n() const { return layout.n_x; }
  int q() const { return layout.q; }
  int rows() const { return static_cast<int>(a.size()); }

  Eigen::VectorXd l_theta(const Eigen::VectorXd& th) const;
  Eigen::VectorXd l_theta() const { return l_theta(theta); }
  Eigen::MatrixXd hessian() const;  // Qt + Diag(theta)
  double objective(const ModelPoint& p) const;
  ReformModel with_theta(Eigen::VectorXd th) const;
};

ReformModel build_mbqp(const CenteredProblem& cp, const Eigen::VectorXd& theta,
                       ReformOptions opts = {});

// Baseline: one binary per admissible value, x~_i = sum v y_iv, sum y_iv = 1.
ReformModel build_naive(const CenteredProblem& cp, const Eigen::VectorXd& theta);
ReformModel build_naive(const CenteredProblem& cp);

// Binary completion of a lattice point. For x~_i = 0 on I every y_ik and z_i
// are zero. Throws DomainError off the lattice.
ModelPoint lift(const ReformModel& model, std::span<const std::int64_t> xt);

// x~ implied by a 0/1 assignment of the binaries (magnitude from y, sign
// from z). Feasibility of the result is not checked.
Eigen::VectorXd decode(const ReformModel& model, const Eigen::VectorXd& w);

struct FeasibilityReport {
  bool feasible = true;
  double worst = 0.0;
  std::array<double, kRowFamilyCount> worst_by_family{};
  double integrality = 0.0;  // max distance of a binary from {0, 1}
};

FeasibilityReport check_feasible(const ReformModel& model, const ModelPoint& p,
                                 double tol);

// CPLEX-LP style listing; coefficients in shortest round-trip decimal.
void write_lp(const ReformModel& model, std::ostream& out);

}  // namespace mbqp

#endif  // MBQP_REFORM_HPP_

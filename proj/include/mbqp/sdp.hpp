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

#ifndef MBQP_SDP_HPP_
#define MBQP_SDP_HPP_

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mbqp/reform.hpp"
#include "mbqp/transform.hpp"

namespace mbqp {

enum class ThetaMethod { kSdp, kEig, kZero };

std::string_view theta_method_name(ThetaMethod m);
ThetaMethod parse_theta_method(const std::string& text);

// Added to every theta handed to the QP solver so that SDP solutions on the
// boundary of the PSD cone stay convex.
inline constexpr double kThetaMargin = 1e-8;

// Rows of the continuous relaxation used for duality: the model rows
// followed by 0 <= w_j and w_j <= 1 for every binary.
struct DualityRows {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::VectorXd a;
  std::vector<RowSense> sense;
};

DualityRows duality_rows(const ReformModel& model);

// Multipliers (theta, lambda, tau) proving the relaxation bound
// tau - a'lambda + k0.
struct DualCertificate {
  Eigen::VectorXd theta;
  Eigen::VectorXd lambda;
  double tau = 0.0;
  double bound = 0.0;
  bool from_sdp = true;  // false when the eigenvalue-shift fallback was used
  int iterations = 0;
  // Post-validation.
  double lmi_min_eigenvalue = 0.0;
  double equality_residual = 0.0;
  double min_multiplier = 0.0;
  std::string note;
};

struct SdpOptions {
  double tol = 1e-9;
  double accept_tol = 1e-6;
  int max_iter = 200;
};

// Maximizes tau - a'lambda over lambda (>= 0 on inequality rows), theta and
// tau subject to
//
//   [ -tau               (ct + A'lambda)'/2    (B'lambda - L(theta))'/2 ]
//   [ (ct + A'lambda)/2   Qt + Diag(theta)      0                       ]  >= 0.
//   [ (B'lambda - L(theta))/2   0                0                       ]
//
// A PSD matrix with a zero diagonal block has zero off-diagonal coupling to
// that block (every 2x2 principal minor [[a, b], [b, 0]] must have b = 0), so
// the condition splits into the linear equations B'lambda = L(theta) and the
// (n+1)-dimensional LMI on the upper-left block. The equations are removed
// by parametrizing (lambda, theta) over an orthonormal basis of their null
// space, leaving a dual-form SDP with one (n+1) PSD block and one
// nonnegative block for the inequality multipliers. Falls back to
// eig_shift_theta (and a QP-derived certificate) if the interior-point
// method does not converge.
DualCertificate solve_theta_sdp(const CenteredProblem& cp, const ReformModel& skeleton,
                                const SdpOptions& opts = {});

// theta_i = max(0, -lambda_min(Qt)) + 1e-8 for every i.
Eigen::VectorXd eig_shift_theta(const CenteredProblem& cp);

// v(R(theta)) + k0 from a single QP solve of the relaxation.
double evaluate_relaxation(const CenteredProblem& cp, const Eigen::VectorXd& theta,
                           ReformOptions opts = {});

// Smallest eigenvalue of the full block matrix above at the certificate.
double certificate_lmi_min_eigenvalue(const ReformModel& skeleton,
                                      const DualCertificate& cert);

struct ThetaChoice {
  ThetaMethod method = ThetaMethod::kSdp;
  Eigen::VectorXd theta;  // includes kThetaMargin where applicable
  std::optional<DualCertificate> certificate;
};

ThetaChoice select_theta(const CenteredProblem& cp, ThetaMethod method,
                         ReformOptions opts = {}, const SdpOptions& sdp = {});

}  // namespace mbqp

#endif  // MBQP_SDP_HPP_

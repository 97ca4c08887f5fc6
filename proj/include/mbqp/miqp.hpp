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

#ifndef MBQP_MIQP_HPP_
#define MBQP_MIQP_HPP_

#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>

#include "mbqp/cqp.hpp"
#include "mbqp/reform.hpp"
#include "mbqp/sdp.hpp"
#include "mbqp/transform.hpp"

namespace mbqp {

enum class SolveStatus { kOptimal, kTimeLimit };

std::string_view solve_status_name(SolveStatus s);

struct SolveOptions {
  double tol = 1e-6;
  double time_limit = std::numeric_limits<double>::infinity();  // seconds
  std::int64_t node_limit = std::numeric_limits<std::int64_t>::max();
  // Lower bound known before the root is solved (see warm_bound).
  std::optional<double> initial_bound;
  CqpOptions cqp;
};

struct SolveResult {
  SolveStatus status = SolveStatus::kTimeLimit;
  std::optional<IntVector> x_best;  // original space
  double obj = std::numeric_limits<double>::infinity();
  std::int64_t nodes = 0;
  double wall_time = 0.0;
  double gap = std::numeric_limits<double>::infinity();
  double root_bound = -std::numeric_limits<double>::infinity();
  double root_relaxation = -std::numeric_limits<double>::infinity();
};

// Best-bound branch-and-bound over the binaries of an MBQP model (or the
// one-hot baseline). Node relaxations are convex QPs, so Qt + Diag(theta)
// must be PSD up to 1e-8 (scaled); smaller violations are absorbed by
// raising theta, which leaves the model exact. Throws NonconvexError
// otherwise.
SolveResult solve(const CenteredProblem& cp, const ReformModel& model,
                  const SolveOptions& opts = {});

// Lower bound carried by an SDP certificate for this model. Throws
// ParameterError if the certificate was computed for another theta.
double warm_bound(const ReformModel& model, const DualCertificate& cert);

}  // namespace mbqp

#endif  // MBQP_MIQP_HPP_

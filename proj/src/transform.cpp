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

#include "mbqp/transform.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mbqp/error.hpp"
#include "mbqp/kernels.hpp"

namespace mbqp {

CenteredProblem center(const Instance& inst) {
  CenteredProblem cp;
  const int n = inst.n;
  cp.n = n;
  cp.in_I.resize(n);
  cp.m.resize(n);
  cp.s.resize(n);
  cp.t.resize(n);
  cp.l = inst.l;
  cp.u = inst.u;
  for (int i = 0; i < n; ++i) {
    const std::int64_t sum = inst.u[i] + inst.l[i];
    const std::int64_t width = inst.u[i] - inst.l[i];
    // (u + l)/2 is an integer iff u + l is even.
    const bool integral_mid = (sum % 2) == 0;
    cp.in_I[i] = integral_mid;
    (integral_mid ? cp.I : cp.J).push_back(i);
    cp.m[i] = integral_mid ? width / 2 : width;
    cp.s(i) = integral_mid ? 1.0 : 0.5;
    cp.t(i) = 0.5 * static_cast<double>(sum);
  }
  cp.Qt = cp.s.asDiagonal() * inst.Q * cp.s.asDiagonal();
  cp.Qt = 0.5 * (cp.Qt + cp.Qt.transpose());
  cp.ct = cp.s.asDiagonal() * (2.0 * inst.Q * cp.t + inst.c);
  cp.k0 = cp.t.dot(inst.Q * cp.t) + inst.c.dot(cp.t);
  return cp;
}

double CenteredProblem::objective(std::span<const double> xt) const {
  std::vector<double> scratch(xt.size());
  return kernels::quadratic_form(Qt.data(), xt, scratch) +
         kernels::dot(std::span<const double>(ct.data(), ct.size()), xt) + k0;
}

double CenteredProblem::objective(std::span<const std::int64_t> xt) const {
  std::vector<double> xd(xt.begin(), xt.end());
  return objective(std::span<const double>(xd));
}

bool CenteredProblem::on_lattice(int i, std::int64_t value) const {
  if (value < -m[i] || value > m[i]) return false;
  if (in_I[i]) return true;
  return (value % 2) != 0;
}

IntVector to_centered(const CenteredProblem& cp, std::span<const std::int64_t> x) {
  IntVector xt(cp.n);
  for (int i = 0; i < cp.n; ++i) {
    const std::int64_t sum = cp.u[i] + cp.l[i];
    xt[i] = cp.in_I[i] ? x[i] - sum / 2 : 2 * x[i] - sum;
  }
  return xt;
}

IntVector restore(const CenteredProblem& cp, std::span<const double> xt,
                  double tol) {
  if (static_cast<int>(xt.size()) != cp.n)
    throw RoundingError("restore: dimension mismatch");
  IntVector x(cp.n);
  for (int i = 0; i < cp.n; ++i) {
    const double v = xt[i];
    const auto r = static_cast<std::int64_t>(std::llround(v));
    if (!std::isfinite(v) || std::abs(v - static_cast<double>(r)) > tol ||
        !cp.on_lattice(i, r)) {
      throw RoundingError("coordinate " + std::to_string(i) + " value " +
                          std::to_string(v) + " is not within " +
                          std::to_string(tol) + " of its lattice");
    }
    const std::int64_t sum = cp.u[i] + cp.l[i];
    x[i] = cp.in_I[i] ? r + sum / 2 : (r + sum) / 2;
  }
  return x;
}

IntVector nearest_lattice(const CenteredProblem& cp, std::span<const double> xt) {
  IntVector out(cp.n);
  for (int i = 0; i < cp.n; ++i) {
    const double v = std::clamp(xt[i], -static_cast<double>(cp.m[i]),
                                static_cast<double>(cp.m[i]));
    std::int64_t r;
    if (cp.in_I[i]) {
      r = static_cast<std::int64_t>(std::llround(v));
    } else {
      // Odd lattice: nearest 2k + 1.
      const double k = std::round((v - 1.0) / 2.0);
      r = 2 * static_cast<std::int64_t>(k) + 1;
    }
    out[i] = std::clamp<std::int64_t>(r, -cp.m[i], cp.m[i]);
  }
  return out;
}

}  // namespace mbqp

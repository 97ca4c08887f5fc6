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

#include "mbqp/miqp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>
#include <vector>

#include "mbqp/error.hpp"

namespace mbqp {

std::string_view solve_status_name(SolveStatus s) {
  return s == SolveStatus::kOptimal ? "Optimal" : "TimeLimit";
}

double warm_bound(const ReformModel& model, const DualCertificate& cert) {
  if (cert.theta.size() != model.theta.size())
    throw ParameterError("warm_bound: certificate has the wrong dimension");
  // The model may carry the certificate's theta plus the solving margin.
  const double diff = (cert.theta - model.theta).lpNorm<Eigen::Infinity>();
  if (diff > 1e-7 + kThetaMargin)
    throw ParameterError("warm_bound: certificate theta does not match the model");
  return cert.bound;
}

namespace {

struct Node {
  double bound;
  std::int64_t seq;
  int depth;
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.seq > b.seq;
  }
};

class Incumbent {
 public:
  Incumbent(const CenteredProblem& cp, const ReformModel& model) : cp_(cp), model_(model) {}

  bool has() const { return has_; }
  double value() const { return value_; }
  const IntVector& point() const { return xt_; }

  // Offers a lattice point; keeps it if it improves and passes the model's
  // feasibility check.
  void offer(IntVector xt) {
    local_search(xt);
    const double v = cp_.objective(std::span<const std::int64_t>(xt));
    if (has_ && v >= value_) return;
    const ModelPoint p = lift(model_, xt);
    if (!check_feasible(model_, p, 1e-6).feasible) return;
    has_ = true;
    value_ = v;
    xt_ = std::move(xt);
  }

  // Rounds a relaxation point two ways: x~ to the nearest lattice point and
  // the binaries to 0/1 (decoded).
  void offer_relaxation(const Eigen::VectorXd& x, const Eigen::VectorXd& w) {
    offer(nearest_lattice(cp_, std::span<const double>(x.data(), x.size())));
    Eigen::VectorXd wr = w.array().round();
    const Eigen::VectorXd xd = decode(model_, wr);
    offer(nearest_lattice(cp_, std::span<const double>(xd.data(), xd.size())));
  }

 private:
  std::int64_t step(int i) const { return cp_.in_I[i] ? 1 : 2; }

  // Coordinate-wise improvement over the lattice until no single-coordinate
  // change helps.
  void local_search(IntVector& xt) const {
    const int n = cp_.n;
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x(i) = static_cast<double>(xt[i]);
    Eigen::VectorXd g = cp_.Qt * x;
    bool improved = true;
    for (int pass = 0; improved && pass < 100; ++pass) {
      improved = false;
      for (int i = 0; i < n; ++i) {
        double best = 0.0;
        std::int64_t best_v = xt[i];
        for (std::int64_t v = -cp_.m[i]; v <= cp_.m[i]; v += step(i)) {
          const double d = static_cast<double>(v - xt[i]);
          const double delta = d * (2.0 * g(i) + d * cp_.Qt(i, i) + cp_.ct(i));
          if (delta < best - 1e-12) {
            best = delta;
            best_v = v;
          }
        }
        if (best_v != xt[i]) {
          const double d = static_cast<double>(best_v - xt[i]);
          g += d * cp_.Qt.col(i);
          xt[i] = best_v;
          improved = true;
        }
      }
    }
  }

  const CenteredProblem& cp_;
  const ReformModel& model_;
  bool has_ = false;
  double value_ = std::numeric_limits<double>::infinity();
  IntVector xt_;
};

// A sign binary forced to 1 with every level binary forced to 0 leaves no
// room for x~ on I.
bool trivially_infeasible(const ReformModel& model, const Eigen::VectorXd& hi,
                          const Eigen::VectorXd& lo) {
  if (model.kind != ModelKind::kMbqp || !model.sign_link_cut) return false;
  const VariableLayout& lay = model.layout;
  for (int i = 0; i < lay.n_x; ++i) {
    const int z = lay.z_index[i];
    if (z < 0 || !model.in_I[i] || lo(z) < 0.5) continue;
    bool any = false;
    for (int k = 0; k < lay.y_count[i]; ++k) any = any || hi(lay.y_begin[i] + k) > 0.5;
    if (!any) return true;
  }
  return false;
}

}  // namespace

SolveResult solve(const CenteredProblem& cp, const ReformModel& model_in,
                  const SolveOptions& opts) {
  if (!(opts.tol > 0.0) || !(opts.time_limit >= 0.0) || opts.node_limit < 1)
    throw ParameterError("solve: invalid options");
  if (model_in.n() != cp.n) throw ParameterError("solve: model and problem differ in size");
  const auto t0 = std::chrono::steady_clock::now();
  const auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  ReformModel model = model_in;
  {
    const Eigen::MatrixXd H = model.hessian();
    const double scale = 1.0 + H.cwiseAbs().maxCoeff();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H, Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().size() ? es.eigenvalues().minCoeff() : 0.0;
    if (lmin < -1e-8 * scale)
      throw NonconvexError("solve: Qt + Diag(theta) has eigenvalue " + std::to_string(lmin));
    if (lmin < 0.0) model = model.with_theta(model.theta.array() - lmin + 1e-12);
  }

  const int q = model.q();
  const double tol = opts.tol;
  SolveResult res;
  Incumbent inc(cp, model);
  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  std::int64_t seq = 0;
  const double start_bound = opts.initial_bound.value_or(-std::numeric_limits<double>::infinity());
  open.push(Node{start_bound, seq++, 0, Eigen::VectorXd::Zero(q), Eigen::VectorXd::Ones(q)});

  const auto prunable = [&](double bound) {
    return inc.has() && bound >= inc.value() - tol * (1.0 + std::abs(inc.value()));
  };

  bool limit_hit = false;
  while (!open.empty()) {
    if (prunable(open.top().bound)) break;  // best bound meets the incumbent
    if (elapsed() > opts.time_limit || res.nodes >= opts.node_limit) {
      limit_hit = true;
      break;
    }
    Node node = open.top();
    open.pop();
    ++res.nodes;
    const bool root = res.nodes == 1;

    if (trivially_infeasible(model, node.hi, node.lo)) continue;

    std::vector<int> unfixed;
    for (int j = 0; j < q; ++j)
      if (node.lo(j) != node.hi(j)) unfixed.push_back(j);

    if (unfixed.empty()) {
      const Eigen::VectorXd x = decode(model, node.lo);
      const IntVector xt = nearest_lattice(cp, std::span<const double>(x.data(), x.size()));
      ModelPoint p = lift(model, xt);
      p.w = node.lo;
      if (check_feasible(model, p, 1e-6).feasible) inc.offer(xt);
      continue;
    }

    const CqpSolution sol = solve_cqp(make_relaxation(model, node.lo, node.hi), opts.cqp);
    if (sol.status == CqpStatus::kInfeasible) {
      if (root) res.root_relaxation = std::numeric_limits<double>::infinity();
      continue;
    }
    int branch = unfixed.front();
    if (sol.status == CqpStatus::kOptimal) {
      const double value = sol.value + model.k0;
      if (root) res.root_relaxation = value;
      node.bound = std::max(node.bound, value - 1e-9 * (1.0 + std::abs(value)));
      const Eigen::VectorXd x = sol.x.head(model.n());
      const Eigen::VectorXd w = sol.x.tail(q);
      inc.offer_relaxation(x, w);
      double best_frac = -1.0;
      for (int j : unfixed) {
        const double f = std::min(w(j), 1.0 - w(j));
        if (f > best_frac + 1e-12) {
          best_frac = f;
          branch = j;
        }
      }
      if (best_frac <= 1e-6) {
        // Integral relaxation: its lattice point closes this subtree when
        // the rounding is consistent.
        const IntVector xt = nearest_lattice(cp, std::span<const double>(x.data(), x.size()));
        ModelPoint p = lift(model, xt);
        p.w = w.array().round();
        if (check_feasible(model, p, 1e-6).feasible) {
          inc.offer(xt);
          if (root) res.root_bound = node.bound;
          continue;
        }
      }
    }
    if (root) res.root_bound = node.bound;
    if (prunable(node.bound)) continue;
    for (int val = 0; val <= 1; ++val) {
      Node child{node.bound, seq++, node.depth + 1, node.lo, node.hi};
      child.lo(branch) = child.hi(branch) = val;
      open.push(std::move(child));
    }
  }

  double lower = open.empty() ? std::numeric_limits<double>::infinity() : open.top().bound;
  if (inc.has()) {
    lower = std::min(lower, inc.value());
    res.obj = inc.value();
    const IntVector& xt = inc.point();
    std::vector<double> xd(xt.begin(), xt.end());
    res.x_best = restore(cp, xd);
    res.gap = std::max(0.0, (inc.value() - lower) / (1.0 + std::abs(inc.value())));
  }
  res.status = (!limit_hit && inc.has() && res.gap <= tol) ? SolveStatus::kOptimal
                                                            : SolveStatus::kTimeLimit;
  if (res.nodes == 0) res.root_bound = start_bound;
  res.wall_time = elapsed();
  return res;
}

}  // namespace mbqp

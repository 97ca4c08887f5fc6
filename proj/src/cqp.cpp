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

#include "mbqp/cqp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "mbqp/error.hpp"

namespace mbqp {

std::string_view status_name(CqpStatus s) {
  switch (s) {
    case CqpStatus::kOptimal: return "optimal";
    case CqpStatus::kInfeasible: return "infeasible";
    case CqpStatus::kUnbounded: return "unbounded";
    case CqpStatus::kUnconverged: return "unconverged";
  }
  return "?";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double inf_norm(const Eigen::VectorXd& v) {
  return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>();
}

double inf_norm(const Eigen::MatrixXd& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

// Internal form after fixed variables are substituted out:
//   min 1/2 x'Px + q'x + constant  s.t.  A x + s = b,
//   s >= 0 on the first m_ineq rows, s = 0 on the remaining m_eq rows.
struct StandardForm {
  enum class Origin { kRow, kUpper, kLower };
  struct RowOrigin {
    Origin kind;
    int index;
    double scale;  // internal row = scale * original row
  };

  Eigen::MatrixXd P;
  Eigen::VectorXd q;
  double constant = 0.0;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  int m_ineq = 0;
  int m_eq = 0;
  std::vector<int> free_vars;
  std::vector<int> fixed_vars;
  std::vector<RowOrigin> origin;

  // Set when preprocessing alone proves infeasibility.
  bool trivially_infeasible = false;
  Eigen::VectorXd trivial_rows, trivial_lower, trivial_upper;
};

StandardForm to_standard_form(const CqpProblem& prob, double tol) {
  StandardForm sf;
  const int nv = prob.num_vars();
  const int nr = prob.num_rows();
  Eigen::VectorXd x_fixed = Eigen::VectorXd::Zero(nv);
  for (int j = 0; j < nv; ++j) {
    if (prob.lower(j) > prob.upper(j)) {
      sf.trivially_infeasible = true;
      sf.trivial_rows = Eigen::VectorXd::Zero(nr);
      sf.trivial_lower = Eigen::VectorXd::Zero(nv);
      sf.trivial_upper = Eigen::VectorXd::Zero(nv);
      const double w = 1.0 / (prob.lower(j) - prob.upper(j));
      sf.trivial_lower(j) = w;
      sf.trivial_upper(j) = w;
      return sf;
    }
    if (prob.lower(j) == prob.upper(j)) {
      sf.fixed_vars.push_back(j);
      x_fixed(j) = prob.lower(j);
    } else {
      sf.free_vars.push_back(j);
    }
  }
  const int nf = static_cast<int>(sf.free_vars.size());
  Eigen::MatrixXd G_free(nr, nf);
  Eigen::MatrixXd H_free(nf, nf);
  Eigen::VectorXd g_free(nf);
  for (int a = 0; a < nf; ++a) {
    const int ja = sf.free_vars[a];
    G_free.col(a) = prob.G.col(ja);
    g_free(a) = prob.g(ja) + 2.0 * prob.H.row(ja).dot(x_fixed);
    for (int b = 0; b < nf; ++b) H_free(a, b) = prob.H(ja, sf.free_vars[b]);
  }
  sf.P = 2.0 * H_free;
  sf.q = g_free;
  sf.constant = x_fixed.dot(prob.H * x_fixed) + prob.g.dot(x_fixed);
  const Eigen::VectorXd h_shift = prob.h - prob.G * x_fixed;

  std::vector<Eigen::RowVectorXd> ineq_rows, eq_rows;
  std::vector<double> ineq_rhs, eq_rhs;
  std::vector<StandardForm::RowOrigin> ineq_origin, eq_origin;
  const double scale_h = 1.0 + inf_norm(prob.h);
  for (int r = 0; r < nr; ++r) {
    const Eigen::RowVectorXd coef = G_free.row(r);
    const double cmax = coef.size() ? coef.cwiseAbs().maxCoeff() : 0.0;
    const bool eq = prob.sense[r] == RowSense::kEqual;
    if (cmax == 0.0) {
      const double rhs = h_shift(r);
      const bool violated = eq ? std::abs(rhs) > tol * scale_h : rhs < -tol * scale_h;
      if (violated && !sf.trivially_infeasible) {
        sf.trivially_infeasible = true;
        sf.trivial_rows = Eigen::VectorXd::Zero(nr);
        sf.trivial_rows(r) = -1.0 / rhs;
      }
      continue;
    }
    const double d = 1.0 / cmax;
    if (eq) {
      eq_rows.push_back(d * coef);
      eq_rhs.push_back(d * h_shift(r));
      eq_origin.push_back({StandardForm::Origin::kRow, r, d});
    } else {
      ineq_rows.push_back(d * coef);
      ineq_rhs.push_back(d * h_shift(r));
      ineq_origin.push_back({StandardForm::Origin::kRow, r, d});
    }
  }
  if (sf.trivially_infeasible) {
    // Complete the certificate over the fixed variables.
    sf.trivial_lower = Eigen::VectorXd::Zero(nv);
    sf.trivial_upper = Eigen::VectorXd::Zero(nv);
    const Eigen::VectorXd gy = prob.G.transpose() * sf.trivial_rows;
    for (int j : sf.fixed_vars) {
      sf.trivial_upper(j) = std::max(-gy(j), 0.0);
      sf.trivial_lower(j) = std::max(gy(j), 0.0);
    }
    return sf;
  }
  for (int a = 0; a < nf; ++a) {
    const int j = sf.free_vars[a];
    if (std::isfinite(prob.upper(j))) {
      Eigen::RowVectorXd e = Eigen::RowVectorXd::Zero(nf);
      e(a) = 1.0;
      ineq_rows.push_back(e);
      ineq_rhs.push_back(prob.upper(j));
      ineq_origin.push_back({StandardForm::Origin::kUpper, j, 1.0});
    }
    if (std::isfinite(prob.lower(j))) {
      Eigen::RowVectorXd e = Eigen::RowVectorXd::Zero(nf);
      e(a) = -1.0;
      ineq_rows.push_back(e);
      ineq_rhs.push_back(-prob.lower(j));
      ineq_origin.push_back({StandardForm::Origin::kLower, j, 1.0});
    }
  }
  sf.m_ineq = static_cast<int>(ineq_rows.size());
  sf.m_eq = static_cast<int>(eq_rows.size());
  const int m = sf.m_ineq + sf.m_eq;
  sf.A.resize(m, nf);
  sf.b.resize(m);
  for (int r = 0; r < sf.m_ineq; ++r) {
    sf.A.row(r) = ineq_rows[r];
    sf.b(r) = ineq_rhs[r];
    sf.origin.push_back(ineq_origin[r]);
  }
  for (int r = 0; r < sf.m_eq; ++r) {
    sf.A.row(sf.m_ineq + r) = eq_rows[r];
    sf.b(sf.m_ineq + r) = eq_rhs[r];
    sf.origin.push_back(eq_origin[r]);
  }
  return sf;
}

// Solves [P  A'; A  -D][dx; dz] = [r1; r2] with D = diag(d) on inequality
// rows and 0 on equality rows. The full quasi-definite matrix is factored
// (with a tiny static regularization) rather than the normal equations:
// d spans ~1e-17..1e17 near the end and eliminating dz would divide by it.
class AugmentedKkt {
 public:
  AugmentedKkt(const Eigen::MatrixXd& P, const Eigen::MatrixXd& A, int m_ineq)
      : P_(P), A_(A), m_ineq_(m_ineq), nx_(static_cast<int>(P.rows())),
        m_(static_cast<int>(A.rows())) {
    reg_ = 1e-12 * (1.0 + std::max(inf_norm(P), inf_norm(A)));
  }

  bool factor(const Eigen::VectorXd& d) {
    d_ = d;
    const int dim = nx_ + m_;
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(dim, dim);
    K.topLeftCorner(nx_, nx_) = P_;
    K.topLeftCorner(nx_, nx_).diagonal().array() += reg_;
    K.bottomLeftCorner(m_, nx_) = A_;
    K.topRightCorner(nx_, m_) = A_.transpose();
    for (int r = 0; r < m_; ++r) K(nx_ + r, nx_ + r) = -(r < m_ineq_ ? d(r) : 0.0) - reg_;
    lu_.compute(K);
    return lu_.rcond() > 1e-30;
  }

  void solve(const Eigen::VectorXd& r1, const Eigen::VectorXd& r2,
             Eigen::VectorXd& dx, Eigen::VectorXd& dz) const {
    Eigen::VectorXd r(nx_ + m_);
    r << r1, r2;
    Eigen::VectorXd sol = lu_.solve(r);
    // Refine against the unregularized system.
    const double target = 1e-15 * (1.0 + inf_norm(r));
    for (int pass = 0; pass < 6; ++pass) {
      const Eigen::VectorXd e = r - apply(sol);
      if (inf_norm(e) <= target) break;
      sol += lu_.solve(e);
    }
    dx = sol.head(nx_);
    dz = sol.tail(m_);
  }

 private:
  Eigen::VectorXd apply(const Eigen::VectorXd& v) const {
    const auto x = v.head(nx_);
    const auto z = v.tail(m_);
    Eigen::VectorXd out(nx_ + m_);
    out.head(nx_) = P_ * x + A_.transpose() * z;
    out.tail(m_) = A_ * x;
    out.segment(nx_, m_ineq_) -= d_.cwiseProduct(z.head(m_ineq_));
    return out;
  }

  const Eigen::MatrixXd& P_;
  const Eigen::MatrixXd& A_;
  int m_ineq_;
  int nx_;
  int m_;
  double reg_ = 0.0;
  Eigen::VectorXd d_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

struct Iterate {
  Eigen::VectorXd x, z, s;
  double tau = 1.0;
  double kappa = 1.0;
};

struct Direction {
  Eigen::VectorXd dx, dz, ds;
  double dtau = 0.0;
  double dkappa = 0.0;
};

// Homogeneous self-dual embedding for a convex QP:
//   P x + A'z + q tau = 0
//   A x + s - b tau = 0
//   q'x + b'z + kappa + x'Px / tau = 0
// with s, z >= 0 on inequality rows and tau, kappa >= 0. tau -> 0 with
// kappa > 0 signals infeasibility; otherwise (x, z, s)/tau is optimal.
class HsdSolver {
 public:
  HsdSolver(const StandardForm& sf, const CqpOptions& opts)
      : sf_(sf), opts_(opts), kkt_(sf.P, sf.A, sf.m_ineq) {
    mi_ = sf.m_ineq;
    m_ = static_cast<int>(sf.A.rows());
    nx_ = static_cast<int>(sf.P.rows());
    norm_q_ = inf_norm(sf.q);
    norm_b_ = inf_norm(sf.b);
  }

  struct Outcome {
    CqpStatus status = CqpStatus::kUnconverged;
    Eigen::VectorXd x, z, s;
    Eigen::VectorXd certificate;  // normalized so that b'y = -1
    int iterations = 0;
  };

  Outcome run() {
    Iterate it;
    it.x = Eigen::VectorXd::Zero(nx_);
    it.z = Eigen::VectorXd::Zero(m_);
    it.s = Eigen::VectorXd::Zero(m_);
    it.z.head(mi_).setOnes();
    it.s.head(mi_).setOnes();

    Outcome best;
    double best_err = kInf;
    int last_gain = 0;
    for (int iter = 0; iter < opts_.max_iter; ++iter) {
      const Eigen::VectorXd Px = sf_.P * it.x;
      const Eigen::VectorXd rx = Px + sf_.A.transpose() * it.z + sf_.q * it.tau;
      const Eigen::VectorXd rz = sf_.A * it.x + it.s - sf_.b * it.tau;
      const double xPx = it.x.dot(Px);
      const double rtau = sf_.q.dot(it.x) + sf_.b.dot(it.z) + it.kappa + xPx / it.tau;

      const double err = optimality_error(it);
      if (err < best_err) {
        last_gain = iter;
        best_err = err;
        best.x = it.x / it.tau;
        best.z = it.z / it.tau;
        best.s = it.s / it.tau;
        best.iterations = iter;
      }
      if (err <= opts_.tol) {
        best.status = CqpStatus::kOptimal;
        return best;
      }
      if (best_err <= opts_.accept_tol && iter - last_gain >= 8) break;
      if (auto cert = infeasibility_certificate(it)) {
        Outcome out;
        out.status = CqpStatus::kInfeasible;
        out.certificate = *cert;
        out.iterations = iter;
        return out;
      }
      if (unbounded(it)) {
        best.status = CqpStatus::kUnbounded;
        best.iterations = iter;
        return best;
      }

      const Eigen::VectorXd sI = it.s.head(mi_);
      const Eigen::VectorXd zI = it.z.head(mi_);
      const double mu = (sI.dot(zI) + it.tau * it.kappa) / (mi_ + 1);
      if (!kkt_.factor(sI.cwiseQuotient(zI))) break;

      Eigen::VectorXd v1x, v1z;
      kkt_.solve(-sf_.q, sf_.b, v1x, v1z);

      // Predictor.
      Eigen::VectorXd ds_aff = sI.cwiseProduct(zI);
      Direction aff = direction(it, Px, rx, rz, rtau, 1.0, ds_aff,
                                it.tau * it.kappa, v1x, v1z);
      const double alpha_aff = step_length(it, aff);
      const double sigma = std::pow(1.0 - alpha_aff, 3);

      // Corrector.
      Eigen::VectorXd ds = sI.cwiseProduct(zI).array() - sigma * mu;
      ds += aff.ds.head(mi_).cwiseProduct(aff.dz.head(mi_));
      const double dk = it.tau * it.kappa - sigma * mu + aff.dtau * aff.dkappa;
      Direction dir = direction(it, Px, rx, rz, rtau, 1.0 - sigma, ds, dk, v1x, v1z);
      const double alpha = std::min(1.0, 0.99 * step_length(it, dir));
      if (!(alpha > 1e-12) || !dir.dx.allFinite()) break;

      it.x += alpha * dir.dx;
      it.z += alpha * dir.dz;
      it.s += alpha * dir.ds;
      it.tau += alpha * dir.dtau;
      it.kappa += alpha * dir.dkappa;
      // Keep the orthant strictly interior against round-off.
      for (int r = 0; r < mi_; ++r) {
        it.s(r) = std::max(it.s(r), 1e-300);
        it.z(r) = std::max(it.z(r), 1e-300);
      }
      it.tau = std::max(it.tau, 1e-300);
      it.kappa = std::max(it.kappa, 1e-300);
      best.iterations = iter + 1;
    }
    if (best_err <= opts_.accept_tol) best.status = CqpStatus::kOptimal;
    return best;
  }

 private:
  // Max of scaled primal, dual and gap residuals at (x, z, s)/tau.
  double optimality_error(const Iterate& it) const {
    const Eigen::VectorXd x = it.x / it.tau;
    const Eigen::VectorXd z = it.z / it.tau;
    const Eigen::VectorXd s = it.s / it.tau;
    const Eigen::VectorXd Ax = sf_.A * x;
    const Eigen::VectorXd Px = sf_.P * x;
    const Eigen::VectorXd Atz = sf_.A.transpose() * z;
    const double pres = inf_norm(Eigen::VectorXd(Ax + s - sf_.b)) /
                        (1.0 + std::max({norm_b_, inf_norm(Ax), inf_norm(s)}));
    const double dres = inf_norm(Eigen::VectorXd(Px + Atz + sf_.q)) /
                        (1.0 + std::max({norm_q_, inf_norm(Px), inf_norm(Atz)}));
    const double xPx = x.dot(Px);
    const double pobj = 0.5 * xPx + sf_.q.dot(x);
    const double dobj = -0.5 * xPx - sf_.b.dot(z);
    const double gap = std::abs(pobj - dobj) / (1.0 + std::min(std::abs(pobj), std::abs(dobj)));
    const double err = std::max({pres, dres, gap});
    return std::isfinite(err) ? err : kInf;
  }

  std::optional<Eigen::VectorXd> infeasibility_certificate(const Iterate& it) const {
    const double bz = sf_.b.dot(it.z);
    if (!(bz < 0.0)) return std::nullopt;
    const Eigen::VectorXd y = it.z / (-bz);
    const double res = inf_norm(Eigen::VectorXd(sf_.A.transpose() * y));
    // Loose enough for the embedding's tau -> 0 path, tight enough that a
    // feasible problem cannot produce it.
    if (res > 1e-9 * (1.0 + inf_norm(sf_.A))) return std::nullopt;
    if (it.tau > 1e-6 * it.kappa && res > 1e-12) return std::nullopt;
    return y;
  }

  bool unbounded(const Iterate& it) const {
    const double qx = sf_.q.dot(it.x);
    if (!(qx < 0.0)) return false;
    const double scale = -qx;
    const double px = inf_norm(Eigen::VectorXd(sf_.P * it.x)) / scale;
    const double ax = inf_norm(Eigen::VectorXd(sf_.A * it.x + it.s)) / scale;
    return px <= 1e-9 && ax <= 1e-9 && it.tau < 1e-6 * it.kappa;
  }

  Direction direction(const Iterate& it, const Eigen::VectorXd& Px,
                      const Eigen::VectorXd& rx, const Eigen::VectorXd& rz,
                      double rtau, double eta, const Eigen::VectorXd& d_s,
                      double d_kappa, const Eigen::VectorXd& v1x,
                      const Eigen::VectorXd& v1z) const {
    const Eigen::VectorXd zI = it.z.head(mi_);
    Eigen::VectorXd rhs2 = -eta * rz;
    rhs2.head(mi_) += d_s.cwiseQuotient(zI);
    Eigen::VectorXd v2x, v2z;
    kkt_.solve(-eta * rx, rhs2, v2x, v2z);

    const Eigen::VectorXd xi = it.x / it.tau;
    const Eigen::VectorXd Pxi = Px / it.tau;
    const Eigen::VectorXd c1 = sf_.q + 2.0 * Pxi;
    const double xiPxi = xi.dot(Pxi);
    const double num = eta * rtau - d_kappa / it.tau + c1.dot(v2x) + sf_.b.dot(v2z);
    const double den = it.kappa / it.tau + xiPxi - c1.dot(v1x) - sf_.b.dot(v1z);

    Direction d;
    d.dtau = num / den;
    d.dx = v2x + d.dtau * v1x;
    d.dz = v2z + d.dtau * v1z;
    d.ds = Eigen::VectorXd::Zero(m_);
    d.ds.head(mi_) = -(d_s + it.s.head(mi_).cwiseProduct(d.dz.head(mi_))).cwiseQuotient(zI);
    d.dkappa = -(d_kappa + it.kappa * d.dtau) / it.tau;
    return d;
  }

  double step_length(const Iterate& it, const Direction& d) const {
    double alpha = 1.0 / 0.99;
    const auto limit = [&alpha](double v, double dv) {
      if (dv < 0.0) alpha = std::min(alpha, -v / dv);
    };
    for (int r = 0; r < mi_; ++r) {
      limit(it.s(r), d.ds(r));
      limit(it.z(r), d.dz(r));
    }
    limit(it.tau, d.dtau);
    limit(it.kappa, d.dkappa);
    return std::min(alpha, 1.0 / 0.99);
  }

  const StandardForm& sf_;
  const CqpOptions& opts_;
  AugmentedKkt kkt_;
  int mi_ = 0;
  int m_ = 0;
  int nx_ = 0;
  double norm_q_ = 0.0;
  double norm_b_ = 0.0;
};

void fill_residuals(const CqpProblem& prob, CqpSolution& sol) {
  const double scale = 1.0 + std::max({inf_norm(prob.H), inf_norm(prob.g),
                                       inf_norm(prob.G), inf_norm(prob.h)});
  const Eigen::VectorXd Gx = prob.G * sol.x;
  double pres = 0.0, comp = 0.0;
  for (int r = 0; r < prob.num_rows(); ++r) {
    const double slack = prob.h(r) - Gx(r);
    if (prob.sense[r] == RowSense::kEqual) {
      pres = std::max(pres, std::abs(slack));
    } else {
      pres = std::max(pres, -slack);
      comp = std::max(comp, std::abs(sol.row_duals(r) * slack));
    }
  }
  for (int j = 0; j < prob.num_vars(); ++j) {
    if (std::isfinite(prob.upper(j))) {
      pres = std::max(pres, sol.x(j) - prob.upper(j));
      if (prob.lower(j) != prob.upper(j))
        comp = std::max(comp, std::abs(sol.upper_duals(j) * (prob.upper(j) - sol.x(j))));
    }
    if (std::isfinite(prob.lower(j))) {
      pres = std::max(pres, prob.lower(j) - sol.x(j));
      if (prob.lower(j) != prob.upper(j))
        comp = std::max(comp, std::abs(sol.lower_duals(j) * (sol.x(j) - prob.lower(j))));
    }
  }
  const Eigen::VectorXd stat = 2.0 * prob.H * sol.x + prob.g +
                               prob.G.transpose() * sol.row_duals + sol.upper_duals -
                               sol.lower_duals;
  sol.primal_residual = pres / scale;
  sol.dual_residual = inf_norm(stat) / scale;
  sol.complementarity = comp / scale;
  sol.kkt_residual = std::max({sol.primal_residual, sol.dual_residual, sol.complementarity});
}

}  // namespace

CqpSolution solve_cqp(const CqpProblem& prob, const CqpOptions& opts) {
  const int nv = prob.num_vars();
  const int nr = prob.num_rows();
  if (prob.H.rows() != nv || prob.H.cols() != nv || prob.G.cols() != nv ||
      prob.G.rows() != nr || static_cast<int>(prob.sense.size()) != nr ||
      prob.lower.size() != nv || prob.upper.size() != nv)
    throw ParameterError("solve_cqp: inconsistent problem dimensions");
  if (!prob.H.allFinite() || !prob.g.allFinite() || !prob.G.allFinite() ||
      !prob.h.allFinite())
    throw ParameterError("solve_cqp: data must be finite");

  CqpProblem shifted;
  const CqpProblem* p = &prob;
  if (opts.check_convexity && nv > 0) {
    const double scale = 1.0 + inf_norm(prob.H);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(prob.H, Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    if (lmin < -1e-9 * scale)
      throw NonconvexError("solve_cqp: objective is not convex (lambda_min = " +
                           std::to_string(lmin) + ")");
    if (lmin < 0.0) {
      shifted = prob;
      shifted.H.diagonal().array() += -lmin + 1e-9;
      p = &shifted;
    }
  }

  const StandardForm sf = to_standard_form(*p, opts.accept_tol);
  CqpSolution sol;
  sol.x = Eigen::VectorXd::Zero(nv);
  sol.row_duals = Eigen::VectorXd::Zero(nr);
  sol.lower_duals = Eigen::VectorXd::Zero(nv);
  sol.upper_duals = Eigen::VectorXd::Zero(nv);

  if (sf.trivially_infeasible) {
    sol.status = CqpStatus::kInfeasible;
    sol.farkas_rows = sf.trivial_rows;
    sol.farkas_lower = sf.trivial_lower;
    sol.farkas_upper = sf.trivial_upper;
    sol.value = kInf;
    return sol;
  }

  for (int j : sf.fixed_vars) sol.x(j) = p->lower(j);

  HsdSolver::Outcome out;
  if (sf.free_vars.empty() && sf.A.rows() == 0) {
    out.status = CqpStatus::kOptimal;
    out.x.resize(0);
    out.z.resize(0);
  } else {
    HsdSolver solver(sf, opts);
    out = solver.run();
  }
  sol.status = out.status;
  sol.iterations = out.iterations;

  const auto map_duals = [&](const Eigen::VectorXd& z, Eigen::VectorXd& rows,
                             Eigen::VectorXd& lo, Eigen::VectorXd& up) {
    rows = Eigen::VectorXd::Zero(nr);
    lo = Eigen::VectorXd::Zero(nv);
    up = Eigen::VectorXd::Zero(nv);
    for (int r = 0; r < static_cast<int>(sf.origin.size()); ++r) {
      const auto& o = sf.origin[r];
      switch (o.kind) {
        case StandardForm::Origin::kRow: rows(o.index) += o.scale * z(r); break;
        case StandardForm::Origin::kUpper: up(o.index) += z(r); break;
        case StandardForm::Origin::kLower: lo(o.index) += z(r); break;
      }
    }
  };

  if (out.status == CqpStatus::kInfeasible) {
    map_duals(out.certificate, sol.farkas_rows, sol.farkas_lower, sol.farkas_upper);
    const Eigen::VectorXd gy = p->G.transpose() * sol.farkas_rows;
    for (int j : sf.fixed_vars) {
      sol.farkas_upper(j) = std::max(-gy(j), 0.0);
      sol.farkas_lower(j) = std::max(gy(j), 0.0);
    }
    sol.value = kInf;
    return sol;
  }
  if (out.x.size() != static_cast<int>(sf.free_vars.size())) {
    sol.status = CqpStatus::kUnconverged;
    sol.value = kInf;
    return sol;
  }

  for (int a = 0; a < static_cast<int>(sf.free_vars.size()); ++a)
    sol.x(sf.free_vars[a]) = out.x(a);
  map_duals(out.z, sol.row_duals, sol.lower_duals, sol.upper_duals);
  for (int r = 0; r < nr; ++r)
    if (p->sense[r] == RowSense::kLessEqual) sol.row_duals(r) = std::max(sol.row_duals(r), 0.0);
  // Fixed variables: the reduced cost is the bound multiplier.
  const Eigen::VectorXd reduced = 2.0 * p->H * sol.x + p->g + p->G.transpose() * sol.row_duals;
  for (int j : sf.fixed_vars) {
    sol.lower_duals(j) = std::max(reduced(j), 0.0);
    sol.upper_duals(j) = std::max(-reduced(j), 0.0);
  }
  sol.value = sol.x.dot(prob.H * sol.x) + prob.g.dot(sol.x);
  fill_residuals(prob, sol);
  return sol;
}

double lagrangian_dual_value(const CqpProblem& prob, const CqpSolution& sol) {
  Eigen::VectorXd r = prob.g + prob.G.transpose() * sol.row_duals + sol.upper_duals -
                      sol.lower_duals;
  double constant = -prob.h.dot(sol.row_duals);
  for (int j = 0; j < prob.num_vars(); ++j) {
    if (sol.upper_duals(j) != 0.0) constant -= sol.upper_duals(j) * prob.upper(j);
    if (sol.lower_duals(j) != 0.0) constant += sol.lower_duals(j) * prob.lower(j);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(prob.H);
  const double scale = 1.0 + inf_norm(prob.H);
  const double rscale = 1.0 + inf_norm(r) + inf_norm(prob.g);
  double value = constant;
  for (int k = 0; k < prob.num_vars(); ++k) {
    const double lam = es.eigenvalues()(k);
    const double proj = es.eigenvectors().col(k).dot(r);
    if (lam > 1e-10 * scale) {
      value -= proj * proj / (4.0 * lam);
    } else if (std::abs(proj) > 1e-7 * rscale) {
      return -kInf;
    }
  }
  return value;
}

double farkas_residual(const CqpProblem& prob, const CqpSolution& sol) {
  if (sol.farkas_rows.size() != prob.num_rows()) return kInf;
  const Eigen::VectorXd& y = sol.farkas_rows;
  const Eigen::VectorXd stat = prob.G.transpose() * y + sol.farkas_upper - sol.farkas_lower;
  double value = prob.h.dot(y);
  double neg = 0.0;
  for (int j = 0; j < prob.num_vars(); ++j) {
    if (sol.farkas_upper(j) != 0.0) value += sol.farkas_upper(j) * prob.upper(j);
    if (sol.farkas_lower(j) != 0.0) value -= sol.farkas_lower(j) * prob.lower(j);
    neg = std::max({neg, -sol.farkas_upper(j), -sol.farkas_lower(j)});
  }
  for (int r = 0; r < prob.num_rows(); ++r)
    if (prob.sense[r] == RowSense::kLessEqual) neg = std::max(neg, -y(r));
  const double scale = 1.0 + inf_norm(prob.G);
  return std::max({inf_norm(stat) / scale, neg, std::abs(value + 1.0)});
}

CqpProblem make_relaxation(const ReformModel& model) {
  return make_relaxation(model, Eigen::VectorXd::Zero(model.q()),
                         Eigen::VectorXd::Ones(model.q()));
}

CqpProblem make_relaxation(const ReformModel& model, const Eigen::VectorXd& w_lower,
                           const Eigen::VectorXd& w_upper) {
  const int n = model.n();
  const int q = model.q();
  CqpProblem p;
  p.H = Eigen::MatrixXd::Zero(n + q, n + q);
  p.H.topLeftCorner(n, n) = model.hessian();
  p.g.resize(n + q);
  p.g.head(n) = model.ct;
  p.g.tail(q) = -model.l_theta();
  p.G.resize(model.rows(), n + q);
  p.G << model.A, model.B;
  p.h = model.a;
  p.sense = model.sense;
  p.lower.resize(n + q);
  p.upper.resize(n + q);
  p.lower.head(n).setConstant(-kInf);
  p.upper.head(n).setConstant(kInf);
  p.lower.tail(q) = w_lower;
  p.upper.tail(q) = w_upper;
  return p;
}

}  // namespace mbqp

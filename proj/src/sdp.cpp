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

#include "mbqp/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

#include "mbqp/cqp.hpp"
#include "mbqp/error.hpp"

namespace mbqp {

std::string_view theta_method_name(ThetaMethod m) {
  switch (m) {
    case ThetaMethod::kSdp: return "sdp";
    case ThetaMethod::kEig: return "eig";
    case ThetaMethod::kZero: return "zero";
  }
  return "?";
}

ThetaMethod parse_theta_method(const std::string& text) {
  if (text == "sdp") return ThetaMethod::kSdp;
  if (text == "eig") return ThetaMethod::kEig;
  if (text == "zero") return ThetaMethod::kZero;
  throw ParameterError("unknown theta method '" + text + "' (sdp|eig|zero)");
}

DualityRows duality_rows(const ReformModel& model) {
  const int n = model.n();
  const int q = model.q();
  const int r0 = model.rows();
  DualityRows d;
  d.A = Eigen::MatrixXd::Zero(r0 + 2 * q, n);
  d.B = Eigen::MatrixXd::Zero(r0 + 2 * q, q);
  d.a = Eigen::VectorXd::Zero(r0 + 2 * q);
  d.A.topRows(r0) = model.A;
  d.B.topRows(r0) = model.B;
  d.a.head(r0) = model.a;
  d.sense = model.sense;
  for (int j = 0; j < q; ++j) {
    d.B(r0 + 2 * j, j) = -1.0;
    d.B(r0 + 2 * j + 1, j) = 1.0;
    d.a(r0 + 2 * j + 1) = 1.0;
    d.sense.push_back(RowSense::kLessEqual);
    d.sense.push_back(RowSense::kLessEqual);
  }
  return d;
}

Eigen::VectorXd eig_shift_theta(const CenteredProblem& cp) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cp.Qt, Eigen::EigenvaluesOnly);
  const double shift = std::max(0.0, -es.eigenvalues().minCoeff()) + 1e-8;
  return Eigen::VectorXd::Constant(cp.n, shift);
}

double evaluate_relaxation(const CenteredProblem& cp, const Eigen::VectorXd& theta,
                           ReformOptions opts) {
  const ReformModel model = build_mbqp(cp, theta, opts);
  const CqpSolution sol = solve_cqp(make_relaxation(model));
  if (sol.status != CqpStatus::kOptimal)
    throw std::runtime_error(std::string("relaxation solve ended ") +
                             std::string(status_name(sol.status)));
  return sol.value + model.k0;
}

namespace {

// max b'y  s.t.  S = C - sum_i y_i F_i >= 0, over one dense PSD block and
// one diagonal (nonnegative orthant) block. Primal: min <C, X> subject to
// <F_i, X> = b_i, X >= 0.
struct BlockSdp {
  int p = 0;  // PSD block order
  int l = 0;  // orthant size
  int m = 0;  // number of free dual variables
  Eigen::MatrixXd C;
  Eigen::VectorXd c_lp;
  std::vector<Eigen::MatrixXd> F;
  Eigen::MatrixXd F_lp;  // l x m
  Eigen::VectorXd b;
};

struct SdpResult {
  bool converged = false;
  Eigen::VectorXd y;
  int iterations = 0;
  double rel_gap = 0.0;
  double primal_infeas = 0.0;
  double dual_infeas = 0.0;
};

double max_step_psd(const Eigen::MatrixXd& X, const Eigen::MatrixXd& dX) {
  Eigen::LLT<Eigen::MatrixXd> llt(X);
  if (llt.info() != Eigen::Success) return 0.0;
  const Eigen::MatrixXd L = llt.matrixL();
  Eigen::MatrixXd T = L.triangularView<Eigen::Lower>().solve(dX);
  T = L.triangularView<Eigen::Lower>().solve(T.transpose()).transpose();
  T = 0.5 * (T + T.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  return lmin < 0.0 ? -1.0 / lmin : std::numeric_limits<double>::infinity();
}

double max_step_lp(const Eigen::VectorXd& x, const Eigen::VectorXd& dx) {
  double alpha = std::numeric_limits<double>::infinity();
  for (int i = 0; i < x.size(); ++i)
    if (dx(i) < 0.0) alpha = std::min(alpha, -x(i) / dx(i));
  return alpha;
}

// Primal-dual path following with the HKM direction and Mehrotra's
// predictor-corrector, from an infeasible start.
SdpResult solve_block_sdp(const BlockSdp& sdp, const SdpOptions& opts) {
  const int p = sdp.p, l = sdp.l, m = sdp.m;
  const int dim = p + l;

  Eigen::MatrixXd Fmat(p * p, m);
  double fmax = 0.0;
  for (int i = 0; i < m; ++i) {
    Fmat.col(i) = Eigen::Map<const Eigen::VectorXd>(sdp.F[i].data(), p * p);
    const double fn = std::sqrt(sdp.F[i].squaredNorm() +
                                (l ? sdp.F_lp.col(i).squaredNorm() : 0.0));
    fmax = std::max(fmax, fn);
  }
  const double cnorm = std::sqrt(sdp.C.squaredNorm() + sdp.c_lp.squaredNorm());
  double alpha0 = 0.0;
  for (int i = 0; i < m; ++i) {
    const double fn = std::sqrt(sdp.F[i].squaredNorm() +
                                (l ? sdp.F_lp.col(i).squaredNorm() : 0.0));
    alpha0 = std::max(alpha0, (1.0 + std::abs(sdp.b(i))) / (1.0 + fn));
  }
  alpha0 *= dim;
  const double beta0 = (1.0 + std::max(fmax, cnorm)) / std::sqrt(static_cast<double>(dim));

  Eigen::MatrixXd X = alpha0 * Eigen::MatrixXd::Identity(p, p);
  Eigen::MatrixXd S = beta0 * Eigen::MatrixXd::Identity(p, p);
  Eigen::VectorXd x = Eigen::VectorXd::Constant(l, alpha0);
  Eigen::VectorXd s = Eigen::VectorXd::Constant(l, beta0);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m);

  const double bnorm = sdp.b.norm();
  const auto op_A = [&](const Eigen::MatrixXd& Y, const Eigen::VectorXd& yl) {
    Eigen::VectorXd out = Fmat.transpose() * Eigen::Map<const Eigen::VectorXd>(Y.data(), p * p);
    if (l) out += sdp.F_lp.transpose() * yl;
    return out;
  };
  const auto op_At = [&](const Eigen::VectorXd& v) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(p, p);
    for (int i = 0; i < m; ++i)
      if (v(i) != 0.0) out += v(i) * sdp.F[i];
    return out;
  };

  SdpResult res;
  SdpResult best;
  double best_err = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < opts.max_iter; ++iter) {
    const Eigen::MatrixXd Rd = sdp.C - op_At(y) - S;
    const Eigen::VectorXd rd_lp = l ? Eigen::VectorXd(sdp.c_lp - sdp.F_lp * y - s)
                                    : Eigen::VectorXd();
    const Eigen::VectorXd rp = sdp.b - op_A(X, x);
    const double pobj = (sdp.C.cwiseProduct(X)).sum() + (l ? sdp.c_lp.dot(x) : 0.0);
    const double dobj = sdp.b.dot(y);
    const double pinf = rp.norm() / (1.0 + bnorm);
    const double dinf = std::sqrt(Rd.squaredNorm() + (l ? rd_lp.squaredNorm() : 0.0)) /
                        (1.0 + cnorm);
    const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    const double err = std::max({pinf, dinf, gap});
    if (err < best_err && std::isfinite(err)) {
      best_err = err;
      best.y = y;
      best.iterations = iter;
      best.rel_gap = gap;
      best.primal_infeas = pinf;
      best.dual_infeas = dinf;
    }
    if (err <= opts.tol) break;
    // Past the attainable accuracy the Schur system degrades and the
    // iterates drift; keep the best one.
    if (best_err <= opts.accept_tol && err > 100.0 * best_err) break;

    const double mu = ((X.cwiseProduct(S)).sum() + (l ? x.dot(s) : 0.0)) / dim;
    Eigen::LLT<Eigen::MatrixXd> sllt(S);
    if (sllt.info() != Eigen::Success) break;
    const Eigen::MatrixXd Sinv = sllt.solve(Eigen::MatrixXd::Identity(p, p));
    const Eigen::VectorXd sinv_lp = l ? Eigen::VectorXd(s.cwiseInverse()) : Eigen::VectorXd();

    // Schur complement M_ij = tr(F_i X F_j S^-1) + sum_k f_ik f_jk x_k / s_k.
    Eigen::MatrixXd Gt(p * p, m);
    for (int j = 0; j < m; ++j) {
      const Eigen::MatrixXd G = X * sdp.F[j] * Sinv;
      const Eigen::MatrixXd GT = G.transpose();
      Gt.col(j) = Eigen::Map<const Eigen::VectorXd>(GT.data(), p * p);
    }
    Eigen::MatrixXd M = Fmat.transpose() * Gt;
    if (l) M += sdp.F_lp.transpose() * (x.cwiseProduct(sinv_lp)).asDiagonal() * sdp.F_lp;
    M = 0.5 * (M + M.transpose());
    Eigen::LLT<Eigen::MatrixXd> mllt(M);
    if (mllt.info() != Eigen::Success) {
      M.diagonal().array() += 1e-12 * (1.0 + M.diagonal().cwiseAbs().maxCoeff());
      mllt.compute(M);
      if (mllt.info() != Eigen::Success) break;
    }

    const Eigen::MatrixXd XRdSinv = X * Rd * Sinv;
    const Eigen::VectorXd xrd_lp = l ? Eigen::VectorXd(x.cwiseProduct(rd_lp).cwiseProduct(sinv_lp))
                                     : Eigen::VectorXd();

    struct Step {
      Eigen::VectorXd dy;
      Eigen::MatrixXd dX, dS;
      Eigen::VectorXd dx, ds;
    };
    const auto make_step = [&](double sigma_mu, const Eigen::MatrixXd* corr,
                               const Eigen::VectorXd* corr_lp) {
      Eigen::MatrixXd T = sigma_mu * Sinv - XRdSinv;
      Eigen::VectorXd t_lp;
      if (l) t_lp = sigma_mu * sinv_lp - xrd_lp;
      if (corr) {
        T -= (*corr) * Sinv;
        if (l) t_lp -= corr_lp->cwiseProduct(sinv_lp);
      }
      const Eigen::VectorXd rhs = sdp.b - op_A(T, t_lp);
      Step st;
      st.dy = mllt.solve(rhs);
      for (int pass = 0; pass < 2; ++pass) st.dy += mllt.solve(rhs - M * st.dy);
      st.dS = Rd - op_At(st.dy);
      Eigen::MatrixXd dX = sigma_mu * Sinv - X - X * st.dS * Sinv;
      if (corr) dX -= (*corr) * Sinv;
      st.dX = 0.5 * (dX + dX.transpose());
      if (l) {
        st.ds = rd_lp - sdp.F_lp * st.dy;
        st.dx = sigma_mu * sinv_lp - x - x.cwiseProduct(st.ds).cwiseProduct(sinv_lp);
        if (corr) st.dx -= corr_lp->cwiseProduct(sinv_lp);
      }
      return st;
    };
    const auto steps = [&](const Step& st) {
      double ap = max_step_psd(X, st.dX);
      double ad = max_step_psd(S, st.dS);
      if (l) {
        ap = std::min(ap, max_step_lp(x, st.dx));
        ad = std::min(ad, max_step_lp(s, st.ds));
      }
      return std::pair{ap, ad};
    };

    const Step aff = make_step(0.0, nullptr, nullptr);
    auto [ap_aff, ad_aff] = steps(aff);
    ap_aff = std::min(1.0, ap_aff);
    ad_aff = std::min(1.0, ad_aff);
    const Eigen::MatrixXd Xa = X + ap_aff * aff.dX;
    const Eigen::MatrixXd Sa = S + ad_aff * aff.dS;
    double mu_aff = (Xa.cwiseProduct(Sa)).sum();
    if (l) mu_aff += (x + ap_aff * aff.dx).dot(s + ad_aff * aff.ds);
    mu_aff /= dim;
    const double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);

    const Eigen::MatrixXd corr = aff.dX * aff.dS;
    const Eigen::VectorXd corr_lp = l ? Eigen::VectorXd(aff.dx.cwiseProduct(aff.ds))
                                      : Eigen::VectorXd();
    const Step st = make_step(sigma * mu, &corr, &corr_lp);
    auto [ap, ad] = steps(st);
    ap = std::min(1.0, 0.95 * ap);
    ad = std::min(1.0, 0.95 * ad);
    if (!(ap > 1e-14 && ad > 1e-14) || !st.dy.allFinite()) break;

    X += ap * st.dX;
    S += ad * st.dS;
    y += ad * st.dy;
    if (l) {
      x += ap * st.dx;
      s += ad * st.ds;
    }
    res.iterations = iter + 1;
  }
  if (best.y.size() == 0) best.y = y;
  best.converged = best_err <= opts.accept_tol;
  best.iterations = std::max(best.iterations, res.iterations);
  return best;
}

// Orthonormal basis of the null space of E.
Eigen::MatrixXd null_space(const Eigen::MatrixXd& E) {
  const int cols = static_cast<int>(E.cols());
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(E.transpose());
  qr.setThreshold(1e-12);
  const int rank = static_cast<int>(qr.rank());
  const Eigen::MatrixXd Qfull = qr.householderQ() * Eigen::MatrixXd::Identity(cols, cols);
  return Qfull.rightCols(cols - rank);
}

DualCertificate fallback_certificate(const CenteredProblem& cp, const ReformModel& skeleton,
                                     const std::string& reason) {
  DualCertificate cert;
  cert.from_sdp = false;
  cert.note = reason;
  cert.theta = eig_shift_theta(cp);
  const ReformModel model = skeleton.with_theta(cert.theta);
  const CqpProblem prob = make_relaxation(model);
  const CqpSolution sol = solve_cqp(prob);
  const int r0 = model.rows();
  const int q = model.q();
  cert.lambda = Eigen::VectorXd::Zero(r0 + 2 * q);
  cert.lambda.head(r0) = sol.row_duals;
  for (int j = 0; j < q; ++j) {
    cert.lambda(r0 + 2 * j) = sol.lower_duals(model.n() + j);
    cert.lambda(r0 + 2 * j + 1) = sol.upper_duals(model.n() + j);
  }
  const DualityRows rows = duality_rows(model);
  cert.bound = sol.value + model.k0;
  cert.tau = sol.value + rows.a.dot(cert.lambda);
  return cert;
}

void validate(const ReformModel& skeleton, DualCertificate& cert) {
  const DualityRows rows = duality_rows(skeleton);
  cert.lmi_min_eigenvalue = certificate_lmi_min_eigenvalue(skeleton, cert);
  const Eigen::VectorXd eq = rows.B.transpose() * cert.lambda - skeleton.l_theta(cert.theta);
  cert.equality_residual = eq.size() ? eq.lpNorm<Eigen::Infinity>() : 0.0;
  double mn = std::numeric_limits<double>::infinity();
  for (int r = 0; r < static_cast<int>(rows.sense.size()); ++r)
    if (rows.sense[r] == RowSense::kLessEqual) mn = std::min(mn, cert.lambda(r));
  cert.min_multiplier = std::isfinite(mn) ? mn : 0.0;
}

}  // namespace

double certificate_lmi_min_eigenvalue(const ReformModel& skeleton,
                                      const DualCertificate& cert) {
  const DualityRows rows = duality_rows(skeleton);
  const int n = skeleton.n();
  const int q = skeleton.q();
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(1 + n + q, 1 + n + q);
  const Eigen::VectorXd g = skeleton.ct + rows.A.transpose() * cert.lambda;
  const Eigen::VectorXd h = rows.B.transpose() * cert.lambda - skeleton.l_theta(cert.theta);
  K(0, 0) = -cert.tau;
  K.block(0, 1, 1, n) = 0.5 * g.transpose();
  K.block(1, 0, n, 1) = 0.5 * g;
  K.block(0, 1 + n, 1, q) = 0.5 * h.transpose();
  K.block(1 + n, 0, q, 1) = 0.5 * h;
  K.block(1, 1, n, n) = skeleton.Qt;
  K.block(1, 1, n, n).diagonal() += cert.theta;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

DualCertificate solve_theta_sdp(const CenteredProblem& cp, const ReformModel& skeleton,
                                const SdpOptions& opts) {
  const int n = skeleton.n();
  const int q = skeleton.q();
  const DualityRows rows = duality_rows(skeleton);
  const int r = static_cast<int>(rows.a.size());

  // Equations B'lambda - L theta = 0 over v = (lambda, theta).
  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(q, r + n);
  E.leftCols(r) = rows.B.transpose();
  for (int j = 0; j < q; ++j) E(j, r + skeleton.layout.owner[j]) = -skeleton.theta_coef(j);
  const Eigen::MatrixXd N = null_space(E);
  const int d = static_cast<int>(N.cols());
  const Eigen::MatrixXd N_lambda = N.topRows(r);
  const Eigen::MatrixXd N_theta = N.bottomRows(n);

  std::vector<int> ineq;
  for (int k = 0; k < r; ++k)
    if (rows.sense[k] == RowSense::kLessEqual) ineq.push_back(k);

  BlockSdp sdp;
  sdp.p = n + 1;
  sdp.l = static_cast<int>(ineq.size());
  sdp.m = 1 + d;
  sdp.C = Eigen::MatrixXd::Zero(n + 1, n + 1);
  sdp.C.block(0, 1, 1, n) = 0.5 * skeleton.ct.transpose();
  sdp.C.block(1, 0, n, 1) = 0.5 * skeleton.ct;
  sdp.C.block(1, 1, n, n) = skeleton.Qt;
  sdp.c_lp = Eigen::VectorXd::Zero(sdp.l);
  sdp.F_lp = Eigen::MatrixXd::Zero(sdp.l, sdp.m);
  sdp.b = Eigen::VectorXd::Zero(sdp.m);

  Eigen::MatrixXd Ftau = Eigen::MatrixXd::Zero(n + 1, n + 1);
  Ftau(0, 0) = 1.0;
  sdp.F.push_back(Ftau);
  sdp.b(0) = 1.0;
  const Eigen::MatrixXd AtN = rows.A.transpose() * N_lambda;  // n x d
  const Eigen::VectorXd Nta = -(N_lambda.transpose() * rows.a);
  for (int k = 0; k < d; ++k) {
    Eigen::MatrixXd Fk = Eigen::MatrixXd::Zero(n + 1, n + 1);
    Fk.block(0, 1, 1, n) = -0.5 * AtN.col(k).transpose();
    Fk.block(1, 0, n, 1) = -0.5 * AtN.col(k);
    Fk.block(1, 1, n, n).diagonal() = -N_theta.col(k);
    sdp.F.push_back(std::move(Fk));
    for (int t = 0; t < sdp.l; ++t) sdp.F_lp(t, 1 + k) = -N_lambda(ineq[t], k);
    sdp.b(1 + k) = Nta(k);
  }

  const SdpResult res = solve_block_sdp(sdp, opts);
  if (!res.converged) {
    std::cerr << "warning: theta SDP did not converge (gap " << res.rel_gap
              << "); falling back to the eigenvalue shift\n";
    DualCertificate cert = fallback_certificate(cp, skeleton, "sdp did not converge");
    cert.iterations = res.iterations;
    validate(skeleton, cert);
    return cert;
  }

  DualCertificate cert;
  cert.iterations = res.iterations;
  const Eigen::VectorXd mu = res.y.tail(d);
  cert.tau = res.y(0);
  cert.lambda = N_lambda * mu;
  cert.theta = N_theta * mu;
  for (int k : ineq) {
    // Interior iterates keep these positive up to the dual residual.
    if (cert.lambda(k) < 0.0 && cert.lambda(k) > -1e-9) cert.lambda(k) = 0.0;
  }
  cert.bound = cert.tau - rows.a.dot(cert.lambda) + skeleton.k0;
  validate(skeleton, cert);
  return cert;
}

ThetaChoice select_theta(const CenteredProblem& cp, ThetaMethod method,
                         ReformOptions opts, const SdpOptions& sdp) {
  ThetaChoice choice;
  choice.method = method;
  switch (method) {
    case ThetaMethod::kZero:
      choice.theta = Eigen::VectorXd::Zero(cp.n);
      break;
    case ThetaMethod::kEig:
      choice.theta = eig_shift_theta(cp);
      break;
    case ThetaMethod::kSdp: {
      const ReformModel skeleton = build_mbqp(cp, Eigen::VectorXd::Zero(cp.n), opts);
      DualCertificate cert = solve_theta_sdp(cp, skeleton, sdp);
      choice.theta = cert.theta.array() + (cert.from_sdp ? kThetaMargin : 0.0);
      choice.certificate = std::move(cert);
      break;
    }
  }
  return choice;
}

}  // namespace mbqp

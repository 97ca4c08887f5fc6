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

#include "mbqp/reform.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

#include "mbqp/error.hpp"

namespace mbqp {

std::string_view family_name(RowFamily f) {
  switch (f) {
    case RowFamily::kAbsLower: return "abs_lower";
    case RowFamily::kAbsUpper: return "abs_upper";
    case RowFamily::kSignLink: return "sign_link";
    case RowFamily::kLevelCount: return "level_count";
    case RowFamily::kOneHot: return "one_hot";
    case RowFamily::kSignNeg: return "sign_neg";
    case RowFamily::kSignPos: return "sign_pos";
    case RowFamily::kLevelLink: return "level_link";
  }
  return "?";
}

Eigen::VectorXd ReformModel::l_theta(const Eigen::VectorXd& th) const {
  Eigen::VectorXd out(q());
  for (int j = 0; j < q(); ++j) out(j) = theta_coef(j) * th(layout.owner[j]);
  return out;
}

Eigen::MatrixXd ReformModel::hessian() const {
  Eigen::MatrixXd h = Qt;
  h.diagonal() += theta;
  return h;
}

double ReformModel::objective(const ModelPoint& p) const {
  return p.x.dot(hessian() * p.x) + ct.dot(p.x) - l_theta().dot(p.w) + k0;
}

ReformModel ReformModel::with_theta(Eigen::VectorXd th) const {
  ReformModel out = *this;
  out.theta = std::move(th);
  return out;
}

namespace {

// Collects rows while the model is being assembled.
class RowBuilder {
 public:
  RowBuilder(int n, int q) : n_(n), q_(q) {}

  void add(int var, RowFamily fam, RowSense sense, double rhs,
           std::vector<std::pair<int, double>> x_terms,
           std::vector<std::pair<int, double>> w_terms) {
    rows_.push_back({var, fam, sense, rhs, std::move(x_terms), std::move(w_terms)});
  }

  void finish(ReformModel& model) const {
    const auto r = static_cast<int>(rows_.size());
    model.A = Eigen::MatrixXd::Zero(r, n_);
    model.B = Eigen::MatrixXd::Zero(r, q_);
    model.a.resize(r);
    model.sense.clear();
    model.family.clear();
    model.row_var.clear();
    for (int k = 0; k < r; ++k) {
      const Row& row = rows_[k];
      for (auto [j, v] : row.x_terms) model.A(k, j) += v;
      for (auto [j, v] : row.w_terms) model.B(k, j) += v;
      model.a(k) = row.rhs;
      model.sense.push_back(row.sense);
      model.family.push_back(row.fam);
      model.row_var.push_back(row.var);
    }
  }

 private:
  struct Row {
    int var;
    RowFamily fam;
    RowSense sense;
    double rhs;
    std::vector<std::pair<int, double>> x_terms;
    std::vector<std::pair<int, double>> w_terms;
  };
  int n_;
  int q_;
  std::vector<Row> rows_;
};

void check_theta(const CenteredProblem& cp, const Eigen::VectorXd& theta) {
  if (theta.size() != cp.n) throw ParameterError("theta must have length n");
  if (!theta.allFinite()) throw ParameterError("theta must be finite");
}

void copy_problem_data(const CenteredProblem& cp, ReformModel& model) {
  model.in_I = cp.in_I;
  model.m = cp.m;
  model.Qt = cp.Qt;
  model.ct = cp.ct;
  model.k0 = cp.k0;
}

}  // namespace

ReformModel build_mbqp(const CenteredProblem& cp, const Eigen::VectorXd& theta,
                       ReformOptions opts) {
  check_theta(cp, theta);
  ReformModel model;
  model.kind = ModelKind::kMbqp;
  model.sign_link_cut = opts.sign_link_cut;
  copy_problem_data(cp, model);
  model.theta = theta;

  VariableLayout& lay = model.layout;
  lay.n_x = cp.n;
  for (int i = 0; i < cp.n; ++i) {
    const std::int64_t mi = cp.m[i];
    const auto count = static_cast<int>(cp.in_I[i] ? mi : (mi + 1) / 2);
    lay.y_begin.push_back(lay.q);
    lay.y_count.push_back(count);
    for (int k = 0; k < count; ++k) {
      lay.owner.push_back(i);
      lay.level.push_back(cp.in_I[i] ? k + 1 : 2 * k + 1);
      lay.is_sign.push_back(false);
    }
    lay.z_index.push_back(lay.q + count);
    lay.owner.push_back(i);
    lay.level.push_back(0);
    lay.is_sign.push_back(true);
    lay.q += count + 1;
  }

  model.theta_coef.resize(lay.q);
  for (int j = 0; j < lay.q; ++j) {
    const auto lev = static_cast<double>(lay.level[j]);
    model.theta_coef(j) = lev * lev;
  }

  RowBuilder rows(cp.n, lay.q);
  for (int i = 0; i < cp.n; ++i) {
    const int b = lay.y_begin[i];
    const int cnt = lay.y_count[i];
    const int z = lay.z_index[i];
    const auto two_m = 2.0 * static_cast<double>(cp.m[i]);
    std::vector<std::pair<int, double>> lev_pos, lev_neg, ones_pos, ones_neg;
    for (int j = b; j < b + cnt; ++j) {
      const auto lev = static_cast<double>(lay.level[j]);
      lev_pos.emplace_back(j, lev);
      lev_neg.emplace_back(j, -lev);
      ones_pos.emplace_back(j, 1.0);
      ones_neg.emplace_back(j, -1.0);
    }
    const auto with = [](std::vector<std::pair<int, double>> v, int j, double c) {
      v.emplace_back(j, c);
      return v;
    };
    const auto le = RowSense::kLessEqual;
    rows.add(i, RowFamily::kAbsLower, le, 0.0, {{i, -1.0}}, lev_neg);
    rows.add(i, RowFamily::kAbsUpper, le, 0.0, {{i, 1.0}}, lev_neg);
    if (cp.in_I[i]) {
      if (opts.sign_link_cut)
        rows.add(i, RowFamily::kSignLink, le, 0.0, {}, with(ones_neg, z, 1.0));
      rows.add(i, RowFamily::kLevelCount, le, 1.0, {}, ones_pos);
    } else {
      rows.add(i, RowFamily::kOneHot, RowSense::kEqual, 1.0, {}, ones_pos);
    }
    rows.add(i, RowFamily::kSignNeg, le, 0.0, {{i, -1.0}}, with(lev_pos, z, -two_m));
    rows.add(i, RowFamily::kSignPos, le, two_m, {{i, 1.0}}, with(lev_pos, z, two_m));
  }
  rows.finish(model);
  return model;
}

ReformModel build_naive(const CenteredProblem& cp) {
  return build_naive(cp, Eigen::VectorXd::Zero(cp.n));
}

ReformModel build_naive(const CenteredProblem& cp, const Eigen::VectorXd& theta) {
  check_theta(cp, theta);
  ReformModel model;
  model.kind = ModelKind::kOneHot;
  model.sign_link_cut = false;
  copy_problem_data(cp, model);
  model.theta = theta;

  VariableLayout& lay = model.layout;
  lay.n_x = cp.n;
  for (int i = 0; i < cp.n; ++i) {
    lay.y_begin.push_back(lay.q);
    const std::int64_t step = cp.in_I[i] ? 1 : 2;
    int count = 0;
    for (std::int64_t v = -cp.m[i]; v <= cp.m[i]; v += step) {
      lay.owner.push_back(i);
      lay.level.push_back(v);
      lay.is_sign.push_back(false);
      ++count;
    }
    lay.y_count.push_back(count);
    lay.z_index.push_back(-1);
    lay.q += count;
  }
  model.theta_coef.resize(lay.q);
  for (int j = 0; j < lay.q; ++j) {
    const auto v = static_cast<double>(lay.level[j]);
    model.theta_coef(j) = v * v;
  }

  RowBuilder rows(cp.n, lay.q);
  for (int i = 0; i < cp.n; ++i) {
    std::vector<std::pair<int, double>> vals, ones;
    for (int j = lay.y_begin[i]; j < lay.y_begin[i] + lay.y_count[i]; ++j) {
      vals.emplace_back(j, -static_cast<double>(lay.level[j]));
      ones.emplace_back(j, 1.0);
    }
    rows.add(i, RowFamily::kLevelLink, RowSense::kEqual, 0.0, {{i, 1.0}}, vals);
    rows.add(i, RowFamily::kOneHot, RowSense::kEqual, 1.0, {}, ones);
  }
  rows.finish(model);
  return model;
}

ModelPoint lift(const ReformModel& model, std::span<const std::int64_t> xt) {
  const VariableLayout& lay = model.layout;
  if (static_cast<int>(xt.size()) != lay.n_x)
    throw DomainError("lift: dimension mismatch");
  ModelPoint p{Eigen::VectorXd::Zero(lay.n_x), Eigen::VectorXd::Zero(lay.q)};
  for (int i = 0; i < lay.n_x; ++i) {
    const std::int64_t v = xt[i];
    const bool odd = !model.in_I[i];
    if (v < -model.m[i] || v > model.m[i] || (odd && v % 2 == 0))
      throw DomainError("lift: x~_" + std::to_string(i) + " = " +
                        std::to_string(v) + " is off the lattice");
    p.x(i) = static_cast<double>(v);
    const int b = lay.y_begin[i];
    if (model.kind == ModelKind::kOneHot) {
      for (int j = b; j < b + lay.y_count[i]; ++j)
        if (lay.level[j] == v) p.w(j) = 1.0;
      continue;
    }
    const std::int64_t mag = v < 0 ? -v : v;
    if (v < 0) p.w(lay.z_index[i]) = 1.0;
    if (mag == 0) continue;  // I only: every y_ik stays 0
    const std::int64_t k = odd ? (mag - 1) / 2 : mag - 1;  // offset in block
    p.w(b + static_cast<int>(k)) = 1.0;
  }
  return p;
}

Eigen::VectorXd decode(const ReformModel& model, const Eigen::VectorXd& w) {
  const VariableLayout& lay = model.layout;
  Eigen::VectorXd x(lay.n_x);
  for (int i = 0; i < lay.n_x; ++i) {
    double sum = 0.0;
    for (int j = lay.y_begin[i]; j < lay.y_begin[i] + lay.y_count[i]; ++j)
      sum += static_cast<double>(lay.level[j]) * std::round(w(j));
    if (model.kind == ModelKind::kMbqp && std::round(w(lay.z_index[i])) == 1.0)
      sum = -sum;
    x(i) = sum;
  }
  return x;
}

FeasibilityReport check_feasible(const ReformModel& model, const ModelPoint& p,
                                 double tol) {
  if (p.x.size() != model.n() || p.w.size() != model.q())
    throw ParameterError("check_feasible: point dimensions do not match layout");
  FeasibilityReport rep;
  const Eigen::VectorXd lhs = model.A * p.x + model.B * p.w;
  for (int r = 0; r < model.rows(); ++r) {
    double viol = lhs(r) - model.a(r);
    if (model.sense[r] == RowSense::kEqual) viol = std::abs(viol);
    viol = std::max(viol, 0.0);
    auto& slot = rep.worst_by_family[static_cast<int>(model.family[r])];
    slot = std::max(slot, viol);
    rep.worst = std::max(rep.worst, viol);
  }
  for (int j = 0; j < model.q(); ++j) {
    const double v = p.w(j);
    rep.integrality = std::max(rep.integrality, std::min(std::abs(v), std::abs(v - 1.0)));
  }
  rep.feasible = rep.worst <= tol && rep.integrality <= tol;
  return rep;
}

namespace {

std::string num(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string binary_name(const ReformModel& model, int j) {
  const VariableLayout& lay = model.layout;
  const int i = lay.owner[j];
  if (lay.is_sign[j]) return "z" + std::to_string(i);
  const std::int64_t lev = lay.level[j];
  return "y" + std::to_string(i) + "_" +
         (lev < 0 ? "m" + std::to_string(-lev) : std::to_string(lev));
}

void term(std::ostream& out, double coef, const std::string& name, bool& first) {
  if (coef == 0.0) return;
  out << (coef < 0 ? " - " : (first ? " " : " + ")) << num(std::abs(coef)) << ' ' << name;
  first = false;
}

}  // namespace

void write_lp(const ReformModel& model, std::ostream& out) {
  const int n = model.n();
  out << "\\ " << (model.kind == ModelKind::kMbqp ? "mbqp" : "one-hot")
      << " model: n = " << n << ", binaries = " << model.q()
      << ", rows = " << model.rows() << "\n";
  out << "\\ objective constant k0 = " << num(model.k0) << "\n";
  out << "Minimize\n obj:";
  bool first = true;
  for (int i = 0; i < n; ++i) term(out, model.ct(i), "x" + std::to_string(i), first);
  const Eigen::VectorXd lt = model.l_theta();
  for (int j = 0; j < model.q(); ++j) term(out, -lt(j), binary_name(model, j), first);
  const Eigen::MatrixXd h = model.hessian();
  out << (first ? " [" : " + [");
  bool qfirst = true;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const double coef = (i == j ? 2.0 : 4.0) * h(i, j);
      const std::string name = i == j ? "x" + std::to_string(i) + " ^2"
                                      : "x" + std::to_string(i) + " * x" + std::to_string(j);
      term(out, coef, name, qfirst);
    }
  }
  out << " ] / 2\nSubject To\n";
  for (int r = 0; r < model.rows(); ++r) {
    out << " " << family_name(model.family[r]) << "_" << model.row_var[r] << ":";
    bool rf = true;
    for (int i = 0; i < n; ++i) term(out, model.A(r, i), "x" + std::to_string(i), rf);
    for (int j = 0; j < model.q(); ++j) term(out, model.B(r, j), binary_name(model, j), rf);
    out << (model.sense[r] == RowSense::kEqual ? " = " : " <= ") << num(model.a(r)) << "\n";
  }
  out << "Bounds\n";
  for (int i = 0; i < n; ++i) out << " x" << i << " free\n";
  out << "Binaries\n";
  for (int j = 0; j < model.q(); ++j) out << " " << binary_name(model, j) << "\n";
  out << "End\n";
}

}  // namespace mbqp

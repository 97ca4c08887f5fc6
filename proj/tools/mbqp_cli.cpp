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

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "mbqp/bench.hpp"
#include "mbqp/error.hpp"
#include "mbqp/instance.hpp"
#include "mbqp/miqp.hpp"
#include "mbqp/oracle.hpp"
#include "mbqp/sdp.hpp"
#include "mbqp/transform.hpp"

namespace {

std::string join(const mbqp::IntVector& x) {
  std::string s = "[";
  for (std::size_t i = 0; i < x.size(); ++i) s += (i ? ", " : "") + std::to_string(x[i]);
  return s + "]";
}

std::string join(const Eigen::VectorXd& v) {
  std::string s = "[";
  for (int i = 0; i < v.size(); ++i) s += (i ? ", " : "") + mbqp::format_double(v(i));
  return s + "]";
}

// Writes to `path`, or stdout when it is empty.
void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

struct BenchArgs {
  std::vector<int> n_list;
  std::vector<double> p_grid;
  int reps = 10;
  std::string box = "ternary";
  std::string theta = "sdp";
  double tol = 1e-6;
  double time_limit = 60.0;
  std::uint64_t seed = 1;
  int jobs = 1;
  double oracle_cap = mbqp::kDefaultPointCap;
  bool no_cut = false;
  std::string out;
  std::string csv;
  std::string dump_dir = ".";
};

void add_bench_options(CLI::App* cmd, BenchArgs& a) {
  cmd->add_option("--n", a.n_list, "dimensions")->required()->delimiter(',');
  cmd->add_option("--p", a.p_grid, "inertia grid (default 0,0.1,...,1)")->delimiter(',');
  cmd->add_option("--reps", a.reps, "instances per (n, p) cell");
  cmd->add_option("--box", a.box, "ternary | pm5 | custom:<l>:<u>");
  cmd->add_option("--tol", a.tol, "relative optimality gap");
  cmd->add_option("--time-limit", a.time_limit, "seconds per instance");
  cmd->add_option("--seed", a.seed, "seed base");
  cmd->add_option("--jobs", a.jobs, "worker threads");
  cmd->add_option("--oracle-cap", a.oracle_cap, "largest box enumerated by the oracle");
  cmd->add_flag("--no-sign-link-cut,--no-remark1-cut", a.no_cut, "drop the z <= sum y rows");
  cmd->add_option("--out", a.out, "Markdown report path");
  cmd->add_option("--dump-dir", a.dump_dir, "where failing instances are written");
}

mbqp::BenchConfig to_config(const BenchArgs& a) {
  mbqp::BenchConfig cfg;
  cfg.n_list = a.n_list;
  if (!a.p_grid.empty()) cfg.p_grid = a.p_grid;
  cfg.reps = a.reps;
  cfg.box = mbqp::BoxProfile::parse(a.box);
  cfg.theta_method = mbqp::parse_theta_method(a.theta);
  cfg.tol = a.tol;
  cfg.time_limit = a.time_limit;
  cfg.seed_base = a.seed;
  cfg.jobs = a.jobs;
  cfg.oracle_cap = a.oracle_cap;
  cfg.sign_link_cut = !a.no_cut;
  cfg.dump_dir = a.dump_dir;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Box-constrained quadratic integer programming via a mixed-binary convex model"};
  app.require_subcommand(1);

  // gen
  int g_n = 0;
  double g_p = 0.0;
  std::uint64_t g_seed = 1;
  std::string g_box = "ternary", g_out;
  auto* gen = app.add_subcommand("gen", "generate a random instance");
  gen->add_option("--n", g_n, "dimension")->required();
  gen->add_option("--p", g_p, "fraction of negative eigenvalues")->required();
  gen->add_option("--seed", g_seed, "seed");
  gen->add_option("--box", g_box, "ternary | pm5 | custom:<l>:<u>");
  gen->add_option("--out", g_out, "output path (stdout if omitted)");

  // solve
  std::string s_inst, s_theta = "sdp", s_out;
  double s_tol = 1e-6, s_limit = 3600.0;
  bool s_no_cut = false, s_onehot = false;
  auto* solve = app.add_subcommand("solve", "solve an instance by branch-and-bound");
  solve->add_option("--instance", s_inst, "instance JSON")->required();
  solve->add_option("--theta", s_theta, "sdp | eig | zero");
  solve->add_option("--tol", s_tol, "relative optimality gap");
  solve->add_option("--time-limit", s_limit, "seconds");
  solve->add_flag("--no-sign-link-cut,--no-remark1-cut", s_no_cut, "drop the z <= sum y rows");
  solve->add_flag("--one-hot", s_onehot, "solve the one-binary-per-value model instead");
  solve->add_option("--out", s_out, "write the report here");

  // oracle
  std::string o_inst;
  double o_cap = mbqp::kDefaultPointCap;
  int o_threads = 1;
  auto* oracle = app.add_subcommand("oracle", "minimize by enumerating every box point");
  oracle->add_option("--instance", o_inst, "instance JSON")->required();
  oracle->add_option("--cap", o_cap, "largest box enumerated");
  oracle->add_option("--threads", o_threads, "worker threads");

  // theta
  std::string t_inst, t_method = "sdp";
  bool t_no_cut = false;
  auto* theta = app.add_subcommand("theta", "compute theta and the root relaxation bound");
  theta->add_option("--instance", t_inst, "instance JSON")->required();
  theta->add_option("--method", t_method, "sdp | eig | zero");
  theta->add_flag("--no-sign-link-cut,--no-remark1-cut", t_no_cut, "drop the z <= sum y rows");

  // bench
  BenchArgs b;
  auto* bench = app.add_subcommand("bench", "run the benchmark protocol");
  add_bench_options(bench, b);
  bench->add_option("--theta", b.theta, "sdp | eig | zero");
  bench->add_option("--csv", b.csv, "per-instance CSV path");

  // compare-theta
  BenchArgs c;
  bool c_onehot = false;
  auto* cmp = app.add_subcommand("compare-theta", "root bounds and node counts, sdp vs eig");
  add_bench_options(cmp, c);
  cmp->add_flag("--one-hot", c_onehot, "also solve the one-hot model");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      const auto inst = mbqp::generate_instance(g_n, g_p, g_seed, mbqp::BoxProfile::parse(g_box));
      emit(g_out, mbqp::to_json(inst) + "\n");
      return 0;
    }
    if (*solve) {
      const auto inst = mbqp::read_instance(s_inst);
      mbqp::PipelineOptions opts;
      opts.theta_method = mbqp::parse_theta_method(s_theta);
      opts.model = s_onehot ? mbqp::ModelKind::kOneHot : mbqp::ModelKind::kMbqp;
      opts.reform.sign_link_cut = !s_no_cut;
      opts.solve.tol = s_tol;
      opts.solve.time_limit = s_limit;
      const auto pr = mbqp::solve_pipeline(inst, opts);
      const auto& r = pr.result;
      std::ostringstream os;
      os << "status: " << mbqp::solve_status_name(r.status) << '\n';
      os << "objective: " << mbqp::format_double(r.obj) << '\n';
      os << "x: " << (r.x_best ? join(*r.x_best) : "none") << '\n';
      os << "nodes: " << r.nodes << '\n';
      os << "time: " << mbqp::format_double(pr.time_sec) << '\n';
      os << "gap: " << mbqp::format_double(r.gap) << '\n';
      os << "root bound: " << mbqp::format_double(r.root_bound) << '\n';
      emit(s_out, os.str());
      return 0;
    }
    if (*oracle) {
      const auto inst = mbqp::read_instance(o_inst);
      const auto res = mbqp::enumerate_min(inst, o_cap, o_threads);
      std::cout << "objective: " << mbqp::format_double(res.obj) << '\n';
      std::cout << "argmin: " << join(res.argmin) << '\n';
      std::cout << "points: " << res.count << '\n';
      return 0;
    }
    if (*theta) {
      const auto inst = mbqp::read_instance(t_inst);
      const auto cp = mbqp::center(inst);
      mbqp::ReformOptions ro;
      ro.sign_link_cut = !t_no_cut;
      const auto choice = mbqp::select_theta(cp, mbqp::parse_theta_method(t_method), ro);
      std::cout << "theta: " << join(choice.theta) << '\n';
      if (choice.certificate) {
        const auto& cert = *choice.certificate;
        std::cout << "dual bound: " << mbqp::format_double(cert.bound) << '\n';
        std::cout << "certificate: " << (cert.from_sdp ? "sdp" : "fallback") << ", lmi min eig "
                  << mbqp::format_double(cert.lmi_min_eigenvalue) << ", equality residual "
                  << mbqp::format_double(cert.equality_residual) << '\n';
      }
      std::cout << "relaxation bound: "
                << mbqp::format_double(mbqp::evaluate_relaxation(cp, choice.theta, ro)) << '\n';
      return 0;
    }
    if (*bench) {
      const auto report = mbqp::run_benchmark(to_config(b));
      std::ostringstream md;
      mbqp::write_markdown(report.rows, md);
      emit(b.out, md.str());
      if (!b.csv.empty()) {
        std::ostringstream csv;
        mbqp::write_csv(report.records, csv);
        emit(b.csv, csv.str());
      }
      return 0;
    }
    if (*cmp) {
      const auto res = mbqp::compare_theta(to_config(c), c_onehot);
      std::ostringstream md;
      mbqp::write_comparison(res, c_onehot, md);
      emit(c.out, md.str());
      if (res.violations() > 0) {
        std::cerr << "error: " << res.violations() << " flagged instance(s)\n";
        return 3;
      }
      return 0;
    }
  } catch (const mbqp::VerificationError& e) {
    std::cerr << "verification failed: " << e.what() << '\n';
    return 3;
  } catch (const mbqp::CapacityError& e) {
    std::cerr << "error: " << e.what() << " (needs --cap " << mbqp::format_double(e.required_cap())
              << ")\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

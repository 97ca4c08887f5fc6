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

#include "mbqp/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <iomanip>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "mbqp/error.hpp"
#include "mbqp/transform.hpp"

namespace mbqp {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

PipelineResult solve_pipeline(const Instance& inst, const PipelineOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  PipelineResult out;
  out.cp = center(inst);
  SolveOptions sopts = opts.solve;
  ReformModel model;
  if (opts.model == ModelKind::kOneHot) {
    // The certificate belongs to the MBQP model, so the baseline only takes
    // theta from it.
    out.theta = select_theta(out.cp, opts.theta_method, opts.reform);
    out.theta.certificate.reset();
    model = build_naive(out.cp, out.theta.theta);
  } else {
    out.theta = select_theta(out.cp, opts.theta_method, opts.reform);
    model = build_mbqp(out.cp, out.theta.theta, opts.reform);
    if (out.theta.certificate) {
      const double wb = warm_bound(model, *out.theta.certificate);
      sopts.initial_bound = sopts.initial_bound ? std::max(*sopts.initial_bound, wb) : wb;
    }
  }
  out.binaries = model.q();
  if (std::isfinite(sopts.time_limit)) {
    const double used =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    sopts.time_limit = std::max(0.0, sopts.time_limit - used);
  }
  out.result = solve(out.cp, model, sopts);
  out.time_sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

std::vector<double> BenchConfig::default_p_grid() {
  std::vector<double> grid;
  for (int k = 0; k <= 10; ++k) grid.push_back(k / 10.0);
  return grid;
}

void BenchConfig::validate() const {
  if (n_list.empty()) throw ParameterError("bench: empty n list");
  for (int n : n_list)
    if (n < 1) throw ParameterError("bench: n must be positive");
  if (p_grid.empty()) throw ParameterError("bench: empty p grid");
  for (double p : p_grid)
    if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("bench: p outside [0, 1]");
  if (reps < 1) throw ParameterError("bench: reps must be positive");
  if (box.lower >= box.upper) throw ParameterError("bench: empty box");
  if (!(tol > 0.0)) throw ParameterError("bench: tol must be positive");
  if (!(time_limit >= 0.0)) throw ParameterError("bench: negative time limit");
  if (jobs < 1) throw ParameterError("bench: jobs must be positive");
}

std::uint64_t cell_seed(std::uint64_t seed_base, int n, int p_index, int rep) {
  std::uint64_t h = mix_seed(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(p_index));
  h = mix_seed(h, static_cast<std::uint64_t>(rep));
  return mix_seed(seed_base, h);
}

namespace {

struct Task {
  int n;
  int p_index;
  int rep;
};

std::vector<Task> make_tasks(const BenchConfig& cfg) {
  std::vector<Task> tasks;
  for (int n : cfg.n_list)
    for (int pi = 0; pi < static_cast<int>(cfg.p_grid.size()); ++pi)
      for (int rep = 0; rep < cfg.reps; ++rep) tasks.push_back({n, pi, rep});
  return tasks;
}

// Runs fn(i) for i in [0, count) on `jobs` threads; rethrows the first
// exception after all workers stop.
template <class Fn>
void parallel_for(std::size_t count, int jobs, Fn fn) {
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr err;
  std::mutex mu;
  const auto worker = [&] {
    for (;;) {
      const std::size_t i = next++;
      if (i >= count || stop) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!err) err = std::current_exception();
        stop = true;
      }
    }
  };
  const int t = std::max(1, std::min<int>(jobs, static_cast<int>(count)));
  if (t == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < t; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (err) std::rethrow_exception(err);
}

std::filesystem::path dump_instance(const BenchConfig& cfg, const Instance& inst,
                                    const InstanceRecord& rec) {
  std::filesystem::create_directories(cfg.dump_dir);
  const auto path = cfg.dump_dir / ("failed_n" + std::to_string(rec.n) + "_p" +
                                    std::to_string(rec.p_index) + "_rep" +
                                    std::to_string(rec.rep) + ".json");
  write_instance(inst, path);
  return path;
}

InstanceRecord run_one(const BenchConfig& cfg, const Task& task) {
  InstanceRecord rec;
  rec.n = task.n;
  rec.p_index = task.p_index;
  rec.p = cfg.p_grid[task.p_index];
  rec.rep = task.rep;
  rec.seed = cell_seed(cfg.seed_base, task.n, task.p_index, task.rep);
  rec.theta_method = std::string(theta_method_name(cfg.theta_method));
  const Instance inst = generate_instance(task.n, rec.p, rec.seed, cfg.box);

  PipelineOptions popts;
  popts.theta_method = cfg.theta_method;
  popts.reform.sign_link_cut = cfg.sign_link_cut;
  popts.solve.tol = cfg.tol;
  popts.solve.time_limit = cfg.time_limit;
  const PipelineResult pr = solve_pipeline(inst, popts);
  const SolveResult& res = pr.result;
  rec.status = res.status;
  rec.obj = res.obj;
  rec.bound_root = res.root_bound;
  rec.nodes = res.nodes;
  rec.time_sec = pr.time_sec;

  std::string problem;
  double direct = std::numeric_limits<double>::infinity();
  if (res.x_best) {
    const IntVector& x = *res.x_best;
    for (int i = 0; i < inst.n; ++i)
      if (x[i] < inst.l[i] || x[i] > inst.u[i]) problem = "incumbent outside the box";
    direct = inst.objective(x);
    if (std::abs(direct - res.obj) > 1e-9 * (1.0 + std::abs(direct)))
      problem = "reported objective differs from direct evaluation";
  }
  if (inst.box_size() <= cfg.oracle_cap) {
    const OracleResult orc = enumerate_min(inst, cfg.oracle_cap);
    rec.oracle_obj = orc.obj;
    const double scale = 1.0 + std::abs(orc.obj);
    if (res.status == SolveStatus::kOptimal && std::abs(res.obj - orc.obj) > cfg.tol * scale)
      problem = "objective " + format_double(res.obj) + " differs from oracle " +
                format_double(orc.obj);
    if (res.x_best && direct < orc.obj - 1e-9 * scale) problem = "incumbent below the oracle";
    if (std::isfinite(res.root_bound) && res.root_bound > orc.obj + 1e-5 * scale)
      problem = "root bound above the oracle optimum";
  } else if (res.status == SolveStatus::kOptimal &&
             res.root_bound > res.obj + cfg.tol * (1.0 + std::abs(res.obj))) {
    problem = "root bound above the reported optimum";
  }
  if (!problem.empty()) {
    const auto path = dump_instance(cfg, inst, rec);
    throw VerificationError("verification failed for n=" + std::to_string(rec.n) +
                            " p=" + format_double(rec.p) + " rep=" + std::to_string(rec.rep) +
                            ": " + problem + " (instance written to " + path.string() + ")");
  }
  rec.verified = true;
  return rec;
}

std::string method_label(const std::string& theta) { return "MBQP(" + theta + ")"; }

}  // namespace

BenchReport run_benchmark(const BenchConfig& cfg) {
  cfg.validate();
  const std::vector<Task> tasks = make_tasks(cfg);
  BenchReport report;
  report.records.resize(tasks.size());
  parallel_for(tasks.size(), cfg.jobs,
               [&](std::size_t i) { report.records[i] = run_one(cfg, tasks[i]); });
  report.rows = aggregate(report.records,
                          method_label(std::string(theta_method_name(cfg.theta_method))));
  return report;
}

std::vector<BenchRow> aggregate(const std::vector<InstanceRecord>& records,
                                const std::string& method) {
  std::map<int, BenchRow> by_n;
  for (const InstanceRecord& r : records) {
    BenchRow& row = by_n[r.n];
    row.n = r.n;
    row.method = method;
    ++row.total;
    if (r.status != SolveStatus::kOptimal) continue;
    ++row.solved;
    row.max_time = std::max(row.max_time, r.time_sec);
    row.avg_time += r.time_sec;
    row.avg_nodes += static_cast<double>(r.nodes);
  }
  std::vector<BenchRow> rows;
  for (auto& [n, row] : by_n) {
    if (row.solved > 0) {
      row.avg_time /= row.solved;
      row.avg_nodes /= row.solved;
    }
    rows.push_back(row);
  }
  return rows;
}

void write_csv(const std::vector<InstanceRecord>& records, std::ostream& out) {
  out << "n,p,seed,theta_method,status,obj,bound_root,nodes,time_sec,oracle_obj,verified\n";
  for (const InstanceRecord& r : records) {
    out << r.n << ',' << format_double(r.p) << ',' << r.seed << ',' << r.theta_method << ','
        << solve_status_name(r.status) << ',' << format_double(r.obj) << ','
        << format_double(r.bound_root) << ',' << r.nodes << ',' << format_double(r.time_sec)
        << ',' << (r.oracle_obj ? format_double(*r.oracle_obj) : "") << ','
        << (r.verified ? "true" : "false") << '\n';
  }
}

void write_markdown(const std::vector<BenchRow>& rows, std::ostream& out) {
  out << "| n | ALG | SOLVED | MAX TIME | AVG TIME | AVG #NODES |\n";
  out << "|---|-----|--------|----------|----------|------------|\n";
  for (const BenchRow& r : rows) {
    std::ostringstream line;
    line << std::fixed;
    line << "| " << r.n << " | " << r.method << " | " << r.solved << " | ";
    if (r.solved > 0) {
      line << std::setprecision(3) << r.max_time << " | " << r.avg_time << " | "
           << std::setprecision(1) << r.avg_nodes << " |";
    } else {
      line << "- | - | - |";
    }
    out << line.str() << '\n';
  }
}

int ThetaComparison::violations() const {
  int v = 0;
  for (const auto& r : rows) v += r.dominance_violations + r.onehot_mismatches;
  return v;
}

ThetaComparison compare_theta(const BenchConfig& cfg, bool with_onehot) {
  cfg.validate();
  const std::vector<Task> tasks = make_tasks(cfg);
  struct Outcome {
    double root_sdp, root_eig, nodes_sdp, nodes_eig, time_sdp, time_eig;
    bool violation;
    bool onehot_mismatch;
    double q_mbqp, q_onehot;
  };
  std::vector<Outcome> outcomes(tasks.size());
  parallel_for(tasks.size(), cfg.jobs, [&](std::size_t i) {
    const Task& t = tasks[i];
    const double p = cfg.p_grid[t.p_index];
    const Instance inst =
        generate_instance(t.n, p, cell_seed(cfg.seed_base, t.n, t.p_index, t.rep), cfg.box);
    PipelineOptions popts;
    popts.reform.sign_link_cut = cfg.sign_link_cut;
    popts.solve.tol = cfg.tol;
    popts.solve.time_limit = cfg.time_limit;
    popts.theta_method = ThetaMethod::kSdp;
    const PipelineResult a = solve_pipeline(inst, popts);
    popts.theta_method = ThetaMethod::kEig;
    const PipelineResult b = solve_pipeline(inst, popts);
    Outcome o{};
    o.root_sdp = a.result.root_relaxation;
    o.root_eig = b.result.root_relaxation;
    o.nodes_sdp = static_cast<double>(a.result.nodes);
    o.nodes_eig = static_cast<double>(b.result.nodes);
    o.time_sdp = a.time_sec;
    o.time_eig = b.time_sec;
    o.violation = o.root_sdp < o.root_eig - 1e-6 * (1.0 + std::abs(o.root_eig));
    o.q_mbqp = a.binaries;
    if (with_onehot) {
      popts.model = ModelKind::kOneHot;
      const PipelineResult c = solve_pipeline(inst, popts);
      o.q_onehot = c.binaries;
      const bool both = a.result.status == SolveStatus::kOptimal &&
                        c.result.status == SolveStatus::kOptimal;
      o.onehot_mismatch =
          both && std::abs(a.result.obj - c.result.obj) > cfg.tol * (1.0 + std::abs(a.result.obj));
    }
    outcomes[i] = o;
  });

  ThetaComparison cmp;
  std::map<std::pair<int, int>, ThetaComparisonRow> cells;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const Task& t = tasks[i];
    const Outcome& o = outcomes[i];
    ThetaComparisonRow& row = cells[{t.n, t.p_index}];
    row.n = t.n;
    row.p = cfg.p_grid[t.p_index];
    ++row.instances;
    row.mean_root_sdp += o.root_sdp;
    row.mean_root_eig += o.root_eig;
    row.mean_nodes_sdp += o.nodes_sdp;
    row.mean_nodes_eig += o.nodes_eig;
    row.mean_time_sdp += o.time_sdp;
    row.mean_time_eig += o.time_eig;
    row.dominance_violations += o.violation ? 1 : 0;
    row.onehot_mismatches += o.onehot_mismatch ? 1 : 0;
    row.mean_binaries_mbqp += o.q_mbqp;
    row.mean_binaries_onehot += o.q_onehot;
  }
  for (auto& [key, row] : cells) {
    const double k = row.instances;
    row.mean_root_sdp /= k;
    row.mean_root_eig /= k;
    row.mean_nodes_sdp /= k;
    row.mean_nodes_eig /= k;
    row.mean_time_sdp /= k;
    row.mean_time_eig /= k;
    row.mean_binaries_mbqp /= k;
    row.mean_binaries_onehot /= k;
    cmp.rows.push_back(row);
  }
  return cmp;
}

void write_comparison(const ThetaComparison& cmp, bool with_onehot, std::ostream& out) {
  out << "| n | p | ROOT (sdp) | ROOT (eig) | #NODES (sdp) | #NODES (eig) | TIME (sdp) | "
         "TIME (eig) | FLAGGED |";
  if (with_onehot) out << " #BIN (mbqp) | #BIN (one-hot) | MISMATCH |";
  out << '\n';
  out << "|---|---|---|---|---|---|---|---|---|";
  if (with_onehot) out << "---|---|---|";
  out << '\n';
  for (const auto& r : cmp.rows) {
    std::ostringstream line;
    line << std::fixed << "| " << r.n << " | " << std::setprecision(1) << r.p << " | "
         << std::setprecision(6) << r.mean_root_sdp << " | " << r.mean_root_eig << " | "
         << std::setprecision(1) << r.mean_nodes_sdp << " | " << r.mean_nodes_eig << " | "
         << std::setprecision(4) << r.mean_time_sdp << " | " << r.mean_time_eig << " | "
         << r.dominance_violations << " |";
    if (with_onehot)
      line << ' ' << std::setprecision(1) << r.mean_binaries_mbqp << " | "
           << r.mean_binaries_onehot << " | " << r.onehot_mismatches << " |";
    out << line.str() << '\n';
  }
}

}  // namespace mbqp

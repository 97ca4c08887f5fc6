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

#ifndef MBQP_BENCH_HPP_
#define MBQP_BENCH_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "mbqp/instance.hpp"
#include "mbqp/miqp.hpp"
#include "mbqp/oracle.hpp"
#include "mbqp/reform.hpp"
#include "mbqp/sdp.hpp"

namespace mbqp {

// Everything needed to solve one instance end to end.
struct PipelineOptions {
  ThetaMethod theta_method = ThetaMethod::kSdp;
  ModelKind model = ModelKind::kMbqp;
  ReformOptions reform;
  SolveOptions solve;
};

struct PipelineResult {
  CenteredProblem cp;
  ThetaChoice theta;
  int binaries = 0;
  SolveResult result;
  double time_sec = 0.0;  // theta selection + model build + branch-and-bound
};

// center -> select theta -> build -> solve. The SDP certificate, when there
// is one, seeds the root bound.
PipelineResult solve_pipeline(const Instance& inst, const PipelineOptions& opts);

struct BenchConfig {
  std::vector<int> n_list;
  std::vector<double> p_grid = default_p_grid();
  int reps = 10;
  BoxProfile box = BoxProfile::ternary();
  ThetaMethod theta_method = ThetaMethod::kSdp;
  bool sign_link_cut = true;
  double tol = 1e-6;
  double time_limit = 60.0;
  std::uint64_t seed_base = 1;
  int jobs = 1;
  double oracle_cap = kDefaultPointCap;
  std::filesystem::path dump_dir = ".";

  static std::vector<double> default_p_grid();  // 0, 0.1, ..., 1
  void validate() const;
};

// Seed of instance `rep` in cell (n, p_grid[p_index]).
std::uint64_t cell_seed(std::uint64_t seed_base, int n, int p_index, int rep);

struct InstanceRecord {
  int n = 0;
  double p = 0.0;
  int p_index = 0;
  int rep = 0;
  std::uint64_t seed = 0;
  std::string theta_method;
  SolveStatus status = SolveStatus::kTimeLimit;
  double obj = 0.0;
  double bound_root = 0.0;
  std::int64_t nodes = 0;
  double time_sec = 0.0;
  std::optional<double> oracle_obj;
  bool verified = false;
};

struct BenchRow {
  int n = 0;
  std::string method;
  int solved = 0;
  int total = 0;
  double max_time = 0.0;
  double avg_time = 0.0;
  double avg_nodes = 0.0;
};

struct BenchReport {
  std::vector<InstanceRecord> records;
  std::vector<BenchRow> rows;
};

// Runs every (n, p, rep) cell. Throws VerificationError after dumping the
// offending instance to cfg.dump_dir when a result disagrees with the
// oracle (or, beyond the oracle's cap, with feasibility and its own bound).
BenchReport run_benchmark(const BenchConfig& cfg);

// Per-n statistics; times and node counts are averaged over solved
// instances only.
std::vector<BenchRow> aggregate(const std::vector<InstanceRecord>& records,
                                const std::string& method);

void write_csv(const std::vector<InstanceRecord>& records, std::ostream& out);
void write_markdown(const std::vector<BenchRow>& rows, std::ostream& out);

struct ThetaComparisonRow {
  int n = 0;
  double p = 0.0;
  int instances = 0;
  double mean_root_sdp = 0.0;
  double mean_root_eig = 0.0;
  double mean_nodes_sdp = 0.0;
  double mean_nodes_eig = 0.0;
  double mean_time_sdp = 0.0;
  double mean_time_eig = 0.0;
  int dominance_violations = 0;  // instances with root(sdp) < root(eig) - 1e-6
  // Only with the one-hot comparison enabled.
  int onehot_mismatches = 0;
  double mean_binaries_mbqp = 0.0;
  double mean_binaries_onehot = 0.0;
};

struct ThetaComparison {
  std::vector<ThetaComparisonRow> rows;
  int violations() const;
};

// Same instance set as run_benchmark, solved with theta from the SDP and
// from the eigenvalue shift. Root bounds are the root relaxation values.
ThetaComparison compare_theta(const BenchConfig& cfg, bool with_onehot = false);

void write_comparison(const ThetaComparison& cmp, bool with_onehot, std::ostream& out);

// Shortest round-trip decimal.
std::string format_double(double v);

}  // namespace mbqp

#endif  // MBQP_BENCH_HPP_

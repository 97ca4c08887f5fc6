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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>

#include "mbqp/bench.hpp"
#include "mbqp/error.hpp"
#include "test_util.hpp"

namespace mbqp {
namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

TEST(Bench, DefaultGrid) {
  const auto g = BenchConfig::default_p_grid();
  ASSERT_EQ(g.size(), 11u);
  for (int k = 0; k <= 10; ++k) EXPECT_DOUBLE_EQ(g[k], k / 10.0);
}

TEST(Bench, CellSeedsDistinct) {
  std::set<std::uint64_t> seen;
  for (int n = 2; n <= 8; ++n)
    for (int p = 0; p < 11; ++p)
      for (int r = 0; r < 10; ++r) seen.insert(cell_seed(1, n, p, r));
  EXPECT_EQ(seen.size(), 7u * 11u * 10u);
  EXPECT_EQ(cell_seed(1, 4, 3, 2), cell_seed(1, 4, 3, 2));
  EXPECT_NE(cell_seed(1, 4, 3, 2), cell_seed(2, 4, 3, 2));
}

TEST(Bench, ValidateRejects) {
  BenchConfig cfg;
  EXPECT_THROW(cfg.validate(), ParameterError);  // empty n_list
  cfg.n_list = {3};
  cfg.reps = 0;
  EXPECT_THROW(cfg.validate(), ParameterError);
  cfg.reps = 1;
  cfg.p_grid = {1.5};
  EXPECT_THROW(cfg.validate(), ParameterError);
}

TEST(Bench, SmallTernaryRunFullyVerified) {
  BenchConfig cfg;
  cfg.n_list = {2, 3, 4, 5, 6};
  cfg.jobs = 4;
  const BenchReport rep = run_benchmark(cfg);
  ASSERT_EQ(rep.records.size(), 5u * 110u);
  ASSERT_EQ(rep.rows.size(), 5u);
  for (const BenchRow& row : rep.rows) {
    EXPECT_EQ(row.solved, 110);
    EXPECT_EQ(row.total, 110);
    EXPECT_EQ(row.method, "MBQP(sdp)");
  }
  for (const InstanceRecord& r : rep.records) {
    EXPECT_TRUE(r.verified);
    ASSERT_TRUE(r.oracle_obj.has_value());
    // Independent check against the odometer.
    const Instance inst = generate_instance(r.n, r.p, r.seed);
    const double bf = testing::brute_force(inst).obj;
    EXPECT_NEAR(r.obj, bf, 1e-6 * (1.0 + std::abs(bf)));
  }
}

TEST(Bench, DeterministicAcrossJobCounts) {
  BenchConfig cfg;
  cfg.n_list = {4};
  cfg.reps = 2;
  cfg.jobs = 1;
  const BenchReport a = run_benchmark(cfg);
  cfg.jobs = 3;
  const BenchReport b = run_benchmark(cfg);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].seed, b.records[i].seed);
    EXPECT_EQ(a.records[i].obj, b.records[i].obj);
    EXPECT_EQ(a.records[i].nodes, b.records[i].nodes);
  }
}

TEST(Bench, CsvMatchesAggregates) {
  BenchConfig cfg;
  cfg.n_list = {3, 5};
  cfg.reps = 3;
  const BenchReport rep = run_benchmark(cfg);
  std::ostringstream os;
  write_csv(rep.records, os);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "n,p,seed,theta_method,status,obj,bound_root,nodes,time_sec,oracle_obj,verified");
  struct Acc {
    int solved = 0;
    double sum_time = 0, max_time = 0, sum_nodes = 0;
  };
  std::map<int, Acc> acc;
  int lines = 0;
  while (std::getline(is, line)) {
    const auto f = split(line, ',');
    ASSERT_EQ(f.size(), 11u) << line;
    ++lines;
    EXPECT_EQ(f[3], "sdp");
    EXPECT_EQ(f[10], "true");
    EXPECT_FALSE(f[9].empty());
    if (f[4] != "Optimal") continue;
    Acc& a = acc[std::stoi(f[0])];
    ++a.solved;
    const double t = std::stod(f[8]);
    a.sum_time += t;
    a.max_time = std::max(a.max_time, t);
    a.sum_nodes += std::stod(f[7]);
    EXPECT_NEAR(std::stod(f[5]), std::stod(f[9]), 1e-6 * (1.0 + std::abs(std::stod(f[9]))));
  }
  EXPECT_EQ(lines, 2 * 33);
  for (const BenchRow& row : rep.rows) {
    const Acc& a = acc[row.n];
    EXPECT_EQ(row.solved, a.solved);
    EXPECT_DOUBLE_EQ(row.max_time, a.max_time);
    EXPECT_NEAR(row.avg_time, a.sum_time / a.solved, 1e-12);
    EXPECT_NEAR(row.avg_nodes, a.sum_nodes / a.solved, 1e-12);
  }
}

TEST(Bench, MarkdownColumns) {
  std::vector<BenchRow> rows = {{4, "MBQP(sdp)", 110, 110, 0.0123, 0.004, 4.8},
                                {6, "MBQP(sdp)", 0, 110, 0, 0, 0}};
  std::ostringstream os;
  write_markdown(rows, os);
  std::istringstream is(os.str());
  std::string header, rule, r1, r2;
  std::getline(is, header);
  std::getline(is, rule);
  std::getline(is, r1);
  std::getline(is, r2);
  EXPECT_EQ(header, "| n | ALG | SOLVED | MAX TIME | AVG TIME | AVG #NODES |");
  EXPECT_EQ(r1, "| 4 | MBQP(sdp) | 110 | 0.012 | 0.004 | 4.8 |");
  EXPECT_EQ(r2, "| 6 | MBQP(sdp) | 0 | - | - | - |");
}

TEST(Bench, AggregateExcludesFailures) {
  std::vector<InstanceRecord> recs(3);
  for (auto& r : recs) r.n = 5;
  recs[0].status = SolveStatus::kOptimal;
  recs[0].time_sec = 1.0;
  recs[0].nodes = 10;
  recs[1].status = SolveStatus::kOptimal;
  recs[1].time_sec = 3.0;
  recs[1].nodes = 20;
  recs[2].status = SolveStatus::kTimeLimit;
  recs[2].time_sec = 60.0;
  recs[2].nodes = 1000;
  const auto rows = aggregate(recs, "X");
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].solved, 2);
  EXPECT_EQ(rows[0].total, 3);
  EXPECT_DOUBLE_EQ(rows[0].max_time, 3.0);
  EXPECT_DOUBLE_EQ(rows[0].avg_time, 2.0);
  EXPECT_DOUBLE_EQ(rows[0].avg_nodes, 15.0);
}

TEST(Bench, TinyTimeLimitCountsFailures) {
  BenchConfig cfg;
  cfg.n_list = {8};
  cfg.reps = 1;
  cfg.time_limit = 1e-9;
  const BenchReport rep = run_benchmark(cfg);
  ASSERT_EQ(rep.rows.size(), 1u);
  EXPECT_LE(rep.rows[0].solved, 2);
  for (const auto& r : rep.records) EXPECT_TRUE(r.verified);
}

TEST(Bench, CompareThetaDominanceAndOneHot) {
  BenchConfig cfg;
  cfg.n_list = {3, 5};
  cfg.reps = 2;
  cfg.jobs = 2;
  const ThetaComparison cmp = compare_theta(cfg, true);
  ASSERT_EQ(cmp.rows.size(), 2u * 11u);
  EXPECT_EQ(cmp.violations(), 0);
  for (const auto& r : cmp.rows) {
    EXPECT_EQ(r.instances, 2);
    EXPECT_GE(r.mean_root_sdp, r.mean_root_eig - 1e-6 * (1.0 + std::abs(r.mean_root_eig)));
    EXPECT_DOUBLE_EQ(r.mean_binaries_mbqp, 2.0 * r.n);
    EXPECT_DOUBLE_EQ(r.mean_binaries_onehot, 3.0 * r.n);
  }
  std::ostringstream os;
  write_comparison(cmp, true, os);
  EXPECT_NE(os.str().find("|"), std::string::npos);
}

TEST(Bench, FormatDoubleRoundTrips) {
  for (double v : {0.1, -2.5, 1e-17, 123456789.125, 0.0}) EXPECT_EQ(std::stod(format_double(v)), v);
  EXPECT_EQ(format_double(0.5), "0.5");
}

TEST(Pipeline, OneHotAndMbqpAgree) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Instance inst = generate_instance(4, 0.5, seed, BoxProfile{-2, 2});
    PipelineOptions a;
    PipelineOptions b;
    b.model = ModelKind::kOneHot;
    const PipelineResult ra = solve_pipeline(inst, a);
    const PipelineResult rb = solve_pipeline(inst, b);
    ASSERT_EQ(ra.result.status, SolveStatus::kOptimal);
    ASSERT_EQ(rb.result.status, SolveStatus::kOptimal);
    EXPECT_NEAR(ra.result.obj, rb.result.obj, 1e-6 * (1.0 + std::abs(ra.result.obj)));
    EXPECT_LT(ra.binaries, rb.binaries);
  }
}

}  // namespace
}  // namespace mbqp

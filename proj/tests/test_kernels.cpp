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
#include <vector>

#include "mbqp/kernels.hpp"
#include "mbqp/rng.hpp"

namespace mbqp::kernels {
namespace {

std::vector<double> random_vector(Xoshiro256& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& e : v) e = rng.uniform(-2.0, 2.0);
  return v;
}

// Sizes straddle the 4- and 8-wide unrolling boundaries.
const std::size_t kSizes[] = {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 33, 64, 100, 257};

TEST(Kernels, ScalarReference) {
  const auto& k = scalar_table();
  const double x[] = {1, 2, 3};
  const double y[] = {4, -5, 6};
  EXPECT_EQ(k.dot(x, y, 3), 12.0);
  double z[] = {1, 1, 1};
  k.axpy(2.0, x, z, 3);
  EXPECT_EQ(z[0], 3.0);
  EXPECT_EQ(z[2], 7.0);
  const double a[] = {1, 3, 2, 4};  // [[1, 2], [3, 4]] column-major
  const double v[] = {1, -1};
  double out[2];
  k.gemv(a, v, out, 2);
  EXPECT_EQ(out[0], -1.0);
  EXPECT_EQ(out[1], -1.0);
}

TEST(Kernels, Avx2MatchesScalar) {
  const KernelTable* simd = avx2_table();
  if (simd == nullptr) GTEST_SKIP() << "AVX2 variant unavailable on this machine";
  const auto& ref = scalar_table();
  Xoshiro256 rng(11);
  for (std::size_t n : kSizes) {
    const auto x = random_vector(rng, n);
    const auto y = random_vector(rng, n);
    double mag = 0.0;
    for (std::size_t i = 0; i < n; ++i) mag += std::abs(x[i] * y[i]);
    EXPECT_NEAR(simd->dot(x.data(), y.data(), n), ref.dot(x.data(), y.data(), n),
                1e-14 * (1.0 + mag))
        << "n=" << n;

    auto y1 = y, y2 = y;
    simd->axpy(-0.75, x.data(), y1.data(), n);
    ref.axpy(-0.75, x.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(y1[i], y2[i], 1e-15 * (1.0 + std::abs(y2[i])));

    const auto a = random_vector(rng, n * n);
    std::vector<double> g1(n), g2(n);
    simd->gemv(a.data(), x.data(), g1.data(), n);
    ref.gemv(a.data(), x.data(), g2.data(), n);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(g1[i], g2[i], 1e-13 * (1.0 + n)) << "n=" << n;
  }
}

TEST(Kernels, ActiveTableIsUsable) {
  const auto& k = active();
  EXPECT_FALSE(k.name.empty());
  std::vector<double> x = {1.0, 2.0, 3.0, 4.0, 5.0};
  std::vector<double> scratch(5);
  std::vector<double> eye(25, 0.0);
  for (int i = 0; i < 5; ++i) eye[i * 5 + i] = 1.0;
  EXPECT_DOUBLE_EQ(quadratic_form(eye.data(), x, scratch), 55.0);
}

}  // namespace
}  // namespace mbqp::kernels

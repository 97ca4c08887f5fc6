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

#ifndef MBQP_KERNELS_HPP_
#define MBQP_KERNELS_HPP_

#include <cassert>
#include <cstddef>
#include <span>
#include <string_view>

namespace mbqp::kernels {

// Dense double-precision inner loops. Every variant must agree with the
// scalar reference up to summation-order round-off.
struct KernelTable {
  std::string_view name;
  // sum_i x[i] * y[i]
  double (*dot)(const double* x, const double* y, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // y = A x for a column-major n x n matrix with leading dimension n
  void (*gemv)(const double* a, const double* x, double* y, std::size_t n);
};

const KernelTable& scalar_table();

// nullptr when the variant was not compiled in or the CPU lacks the ISA.
const KernelTable* avx2_table();

// Picked once on first use: the widest supported variant, unless the
// environment variable MBQP_KERNELS=scalar forces the reference path.
const KernelTable& active();

inline double dot(std::span<const double> x, std::span<const double> y) {
  assert(x.size() == y.size());
  return active().dot(x.data(), y.data(), x.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  active().axpy(alpha, x.data(), y.data(), x.size());
}

// x^T A x for a column-major square matrix; scratch must hold n doubles.
inline double quadratic_form(const double* a, std::span<const double> x,
                             std::span<double> scratch) {
  const auto& k = active();
  k.gemv(a, x.data(), scratch.data(), x.size());
  return k.dot(x.data(), scratch.data(), x.size());
}

}  // namespace mbqp::kernels

#endif  // MBQP_KERNELS_HPP_

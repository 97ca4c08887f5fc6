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

#include "mbqp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "mbqp/error.hpp"
#include "mbqp/kernels.hpp"

namespace mbqp {

GrayWalk::GrayWalk(const Instance& inst, IntVector start, int first)
    : inst_(inst), x_(std::move(start)), dir_(inst.n, 1), qx_(inst.n),
      xd_(inst.n), first_(first) {
  resync();
}

void GrayWalk::resync() {
  std::copy(x_.begin(), x_.end(), xd_.begin());
  kernels::active().gemv(inst_.Q.data(), xd_.data(), qx_.data(), xd_.size());
  obj_ = kernels::dot(xd_, qx_) +
         kernels::dot(std::span<const double>(inst_.c.data(), inst_.c.size()), xd_);
}

bool GrayWalk::next() {
  for (int i = first_; i < inst_.n; ++i) {
    const std::int64_t target = x_[i] + dir_[i];
    if (target < inst_.l[i] || target > inst_.u[i]) {
      dir_[i] = -dir_[i];
      continue;
    }
    const double d = dir_[i];
    // f(x + d e_i) - f(x) = 2 d (Qx)_i + d^2 Q_ii + d c_i
    obj_ += d * (2.0 * qx_[i] + d * inst_.Q(i, i) + inst_.c(i));
    kernels::active().axpy(d, inst_.Q.col(i).data(), qx_.data(), qx_.size());
    x_[i] = target;
    return true;
  }
  return false;
}

namespace {

constexpr std::uint64_t kResyncInterval = 4096;

struct Best {
  double obj = std::numeric_limits<double>::infinity();
  IntVector x;
  std::uint64_t count = 0;
};

// Smaller objective wins; near-ties go to the lexicographically smaller point.
bool better(double obj, const IntVector& x, const Best& best) {
  if (best.x.empty()) return true;
  const double tie = 1e-12 * (1.0 + std::abs(best.obj));
  if (obj < best.obj - tie) return true;
  if (obj > best.obj + tie) return false;
  return x < best.x;
}

Best walk_range(const Instance& inst, std::int64_t lead_lo, std::int64_t lead_hi) {
  Best best;
  for (std::int64_t lead = lead_lo; lead <= lead_hi; ++lead) {
    IntVector start = inst.l;
    start[0] = lead;
    GrayWalk walk(inst, start, 1);
    std::uint64_t steps = 0;
    do {
      ++best.count;
      if (better(walk.objective(), walk.point(), best)) {
        best.obj = walk.objective();
        best.x = walk.point();
      }
      if (++steps % kResyncInterval == 0) walk.resync();
    } while (walk.next());
  }
  return best;
}

}  // namespace

OracleResult enumerate_min(const Instance& inst, double point_cap, int threads) {
  const double size = inst.box_size();
  if (size > point_cap) {
    std::ostringstream msg;
    msg << "box has " << size << " points, above the cap of " << point_cap
        << "; rerun with a cap of at least " << size;
    throw CapacityError(msg.str(), size);
  }
  const std::int64_t lo = inst.l[0];
  const std::int64_t hi = inst.u[0];
  const std::int64_t width = hi - lo + 1;
  const int workers = static_cast<int>(std::clamp<std::int64_t>(threads, 1, width));

  std::vector<Best> parts(workers);
  if (workers == 1) {
    parts[0] = walk_range(inst, lo, hi);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      const std::int64_t a = lo + width * w / workers;
      const std::int64_t b = lo + width * (w + 1) / workers - 1;
      pool.emplace_back([&, w, a, b] { parts[w] = walk_range(inst, a, b); });
    }
    for (auto& t : pool) t.join();
  }

  Best merged;
  for (const Best& part : parts) {
    merged.count += part.count;
    if (!part.x.empty() && better(part.obj, part.x, merged)) {
      merged.obj = part.obj;
      merged.x = part.x;
    }
  }
  OracleResult res;
  res.argmin = merged.x;
  res.obj = inst.objective(res.argmin);
  res.count = merged.count;
  return res;
}

}  // namespace mbqp

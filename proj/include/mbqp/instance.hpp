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

#ifndef MBQP_INSTANCE_HPP_
#define MBQP_INSTANCE_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mbqp/rng.hpp"

namespace mbqp {

using IntVector = std::vector<std::int64_t>;

// Integer box [lower, upper] applied to every coordinate of a generated
// instance.
struct BoxProfile {
  std::int64_t lower = -1;
  std::int64_t upper = 1;

  static BoxProfile ternary() { return {-1, 1}; }
  static BoxProfile pm5() { return {-5, 5}; }
  // Accepts "ternary", "pm5" or "custom:<l>:<u>".
  static BoxProfile parse(const std::string& text);
  std::string label() const;

  bool operator==(const BoxProfile&) const = default;
};

struct InstanceMeta {
  double p = 0.0;
  std::uint64_t seed = 0;

  bool operator==(const InstanceMeta&) const = default;
};

// min x'Qx + c'x  s.t.  l <= x <= u, x integer.
struct Instance {
  int n = 0;
  Eigen::MatrixXd Q;
  Eigen::VectorXd c;
  IntVector l;
  IntVector u;
  std::optional<InstanceMeta> meta;

  double objective(std::span<const std::int64_t> x) const;
  // Number of integer points in the box, as a double to survive overflow.
  double box_size() const;

  bool operator==(const Instance& other) const;
};

// Validates the box, symmetrizes Q as (Q + Q')/2 and returns the instance.
// Throws ParameterError on inconsistent sizes or l_i >= u_i.
Instance make_instance(Eigen::MatrixXd Q, Eigen::VectorXd c, IntVector l,
                       IntVector u, std::optional<InstanceMeta> meta = {});

// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the signs
// of R's diagonal moved into Q.
Eigen::MatrixXd random_orthogonal(int n, Xoshiro256& rng);

// Random instance whose Q has floor(p*n) eigenvalues drawn from [-1, 0] and
// the rest from [0, 1], rotated by a random orthogonal basis; c is uniform on
// [-1, 1]. Deterministic in (n, p, seed, box).
Instance generate_instance(int n, double p, std::uint64_t seed,
                           BoxProfile box = BoxProfile::ternary());

// floor(p*n), robust to p being the nearest double of a short decimal.
int negative_eigenvalue_count(int n, double p);

std::string to_json(const Instance& inst);
Instance from_json(const std::string& text);
void write_instance(const Instance& inst, const std::filesystem::path& path);
Instance read_instance(const std::filesystem::path& path);

}  // namespace mbqp

#endif  // MBQP_INSTANCE_HPP_

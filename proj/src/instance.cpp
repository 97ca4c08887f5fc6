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

#include "mbqp/instance.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "mbqp/error.hpp"
#include "mbqp/kernels.hpp"

namespace mbqp {

using nlohmann::json;

BoxProfile BoxProfile::parse(const std::string& text) {
  if (text == "ternary") return ternary();
  if (text == "pm5") return pm5();
  if (text.rfind("custom:", 0) == 0) {
    std::istringstream in(text.substr(7));
    std::int64_t lo = 0, hi = 0;
    char sep = 0;
    if (in >> lo >> sep >> hi && sep == ':' && in.peek() == EOF) {
      if (lo >= hi) throw ParameterError("box profile needs l < u: " + text);
      return {lo, hi};
    }
  }
  throw ParameterError("unknown box profile '" + text +
                       "' (expected ternary, pm5 or custom:<l>:<u>)");
}

std::string BoxProfile::label() const {
  if (*this == ternary()) return "ternary";
  if (*this == pm5()) return "pm5";
  return "custom:" + std::to_string(lower) + ":" + std::to_string(upper);
}

double Instance::objective(std::span<const std::int64_t> x) const {
  std::vector<double> xd(x.begin(), x.end());
  std::vector<double> scratch(xd.size());
  return kernels::quadratic_form(Q.data(), xd, scratch) +
         kernels::dot(std::span<const double>(c.data(), c.size()), xd);
}

double Instance::box_size() const {
  double count = 1.0;
  for (int i = 0; i < n; ++i) count *= static_cast<double>(u[i] - l[i] + 1);
  return count;
}

bool Instance::operator==(const Instance& other) const {
  return n == other.n && Q == other.Q && c == other.c && l == other.l &&
         u == other.u && meta == other.meta;
}

Instance make_instance(Eigen::MatrixXd Q, Eigen::VectorXd c, IntVector l,
                       IntVector u, std::optional<InstanceMeta> meta) {
  const auto n = static_cast<int>(c.size());
  if (n < 1) throw ParameterError("instance dimension must be positive");
  if (Q.rows() != n || Q.cols() != n)
    throw ParameterError("Q must be n x n with n = size of c");
  if (static_cast<int>(l.size()) != n || static_cast<int>(u.size()) != n)
    throw ParameterError("bounds must have length n");
  for (int i = 0; i < n; ++i) {
    if (l[i] >= u[i])
      throw ParameterError("bounds not strict at index " + std::to_string(i));
  }
  if (!Q.allFinite() || !c.allFinite())
    throw ParameterError("Q and c must be finite");
  Instance inst;
  inst.n = n;
  inst.Q = 0.5 * (Q + Q.transpose());
  inst.c = std::move(c);
  inst.l = std::move(l);
  inst.u = std::move(u);
  inst.meta = meta;
  return inst;
}

Eigen::MatrixXd random_orthogonal(int n, Xoshiro256& rng) {
  if (n < 1) throw ParameterError("random_orthogonal needs n >= 1");
  Eigen::MatrixXd g(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd& r = qr.matrixQR();
  for (int j = 0; j < n; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

int negative_eigenvalue_count(int n, double p) {
  // p = 0.7 is stored as 0.69999...; the product may land a hair under the
  // intended integer.
  return static_cast<int>(std::floor(p * n + 1e-9));
}

Instance generate_instance(int n, double p, std::uint64_t seed, BoxProfile box) {
  if (n < 1) throw ParameterError("n must be >= 1");
  if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("p must lie in [0, 1]");
  if (box.lower >= box.upper) throw ParameterError("box profile needs l < u");

  Xoshiro256 rng(seed);
  const int negatives = negative_eigenvalue_count(n, p);
  Eigen::VectorXd eig(n);
  for (int i = 0; i < n; ++i)
    eig(i) = i < negatives ? rng.uniform(-1.0, 0.0) : rng.uniform(0.0, 1.0);
  const Eigen::MatrixXd basis = random_orthogonal(n, rng);
  Eigen::MatrixXd Q = basis * eig.asDiagonal() * basis.transpose();
  Eigen::VectorXd c(n);
  for (int i = 0; i < n; ++i) c(i) = rng.uniform(-1.0, 1.0);

  return make_instance(std::move(Q), std::move(c), IntVector(n, box.lower),
                       IntVector(n, box.upper), InstanceMeta{p, seed});
}

std::string to_json(const Instance& inst) {
  json doc;
  doc["n"] = inst.n;
  std::vector<double> q(static_cast<std::size_t>(inst.n) * inst.n);
  for (int i = 0; i < inst.n; ++i)
    for (int j = 0; j < inst.n; ++j) q[i * inst.n + j] = inst.Q(i, j);
  doc["Q"] = q;
  doc["c"] = std::vector<double>(inst.c.data(), inst.c.data() + inst.n);
  doc["l"] = inst.l;
  doc["u"] = inst.u;
  if (inst.meta) doc["meta"] = {{"p", inst.meta->p}, {"seed", inst.meta->seed}};
  return doc.dump(1);
}

namespace {

const json& require(const json& doc, const char* key) {
  if (!doc.contains(key)) throw FormatError(key, "missing key");
  return doc.at(key);
}

std::vector<double> real_array(const json& doc, const char* key,
                               std::size_t expected) {
  const json& arr = require(doc, key);
  if (!arr.is_array()) throw FormatError(key, "expected an array");
  if (arr.size() != expected)
    throw FormatError(key, "length " + std::to_string(arr.size()) +
                               " does not match n (expected " +
                               std::to_string(expected) + ")");
  std::vector<double> out;
  out.reserve(expected);
  for (const auto& v : arr) {
    if (!v.is_number()) throw FormatError(key, "non-numeric entry");
    out.push_back(v.get<double>());
  }
  return out;
}

IntVector integer_array(const json& doc, const char* key, std::size_t expected) {
  const json& arr = require(doc, key);
  if (!arr.is_array()) throw FormatError(key, "expected an array");
  if (arr.size() != expected)
    throw FormatError(key, "length does not match n");
  IntVector out;
  out.reserve(expected);
  for (const auto& v : arr) {
    if (v.is_number_integer()) {
      out.push_back(v.get<std::int64_t>());
    } else if (v.is_number_float()) {
      const double d = v.get<double>();
      if (std::floor(d) != d || std::abs(d) > 9.0e15)
        throw FormatError(key, "non-integer bound");
      out.push_back(static_cast<std::int64_t>(d));
    } else {
      throw FormatError(key, "non-integer bound");
    }
  }
  return out;
}

}  // namespace

Instance from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError("", std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw FormatError("", "top level must be an object");
  const json& jn = require(doc, "n");
  if (!jn.is_number_integer() || jn.get<std::int64_t>() < 1)
    throw FormatError("n", "must be a positive integer");
  const auto n = static_cast<std::size_t>(jn.get<std::int64_t>());

  const auto q = real_array(doc, "Q", n * n);
  const auto c = real_array(doc, "c", n);
  IntVector l = integer_array(doc, "l", n);
  IntVector u = integer_array(doc, "u", n);

  Eigen::MatrixXd Q(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) Q(i, j) = q[i * n + j];
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(Q(i, j) - Q(j, i)) > 1e-12)
        throw FormatError("Q", "asymmetric at (" + std::to_string(i) + ", " +
                                   std::to_string(j) + ")");
  for (std::size_t i = 0; i < n; ++i)
    if (l[i] >= u[i])
      throw FormatError("l", "bounds not strict at index " + std::to_string(i));

  std::optional<InstanceMeta> meta;
  if (doc.contains("meta") && !doc["meta"].is_null()) {
    const json& m = doc["meta"];
    if (!m.is_object()) throw FormatError("meta", "expected an object");
    InstanceMeta mm;
    if (m.contains("p")) {
      if (!m["p"].is_number()) throw FormatError("meta", "p must be a number");
      mm.p = m["p"].get<double>();
    }
    if (m.contains("seed")) {
      if (!m["seed"].is_number_unsigned())
        throw FormatError("meta", "seed must be an unsigned integer");
      mm.seed = m["seed"].get<std::uint64_t>();
    }
    meta = mm;
  }
  Eigen::VectorXd cv = Eigen::Map<const Eigen::VectorXd>(c.data(), n);
  return make_instance(std::move(Q), std::move(cv), std::move(l), std::move(u),
                       meta);
}

void write_instance(const Instance& inst, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << to_json(inst) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

Instance read_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("", "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

}  // namespace mbqp

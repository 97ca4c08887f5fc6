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
#include <fstream>

#include "mbqp/error.hpp"
#include "mbqp/instance.hpp"

namespace mbqp {
namespace {

int count_negative(const Eigen::MatrixXd& Q) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Q, Eigen::EigenvaluesOnly);
  int k = 0;
  for (int i = 0; i < Q.rows(); ++i) k += es.eigenvalues()(i) < 0.0 ? 1 : 0;
  return k;
}

TEST(Instance, ZeroInertiaIsPsd) {
  const Instance inst = generate_instance(20, 0.0, 5);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(inst.Q, Eigen::EigenvaluesOnly);
  EXPECT_GE(es.eigenvalues().minCoeff(), -1e-12);
  EXPECT_LE(es.eigenvalues().maxCoeff(), 1.0 + 1e-12);
}

TEST(Instance, FullInertiaIsNsd) {
  const Instance inst = generate_instance(20, 1.0, 5);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(inst.Q, Eigen::EigenvaluesOnly);
  EXPECT_LE(es.eigenvalues().maxCoeff(), 1e-12);
  EXPECT_GE(es.eigenvalues().minCoeff(), -1.0 - 1e-12);
}

TEST(Instance, Deterministic) {
  EXPECT_EQ(generate_instance(10, 0.5, 7), generate_instance(10, 0.5, 7));
  EXPECT_FALSE(generate_instance(10, 0.5, 7) == generate_instance(10, 0.5, 8));
}

TEST(Instance, SpectrumAndRanges) {
  for (int n : {1, 3, 7, 10}) {
    for (int k = 0; k <= 10; ++k) {
      const double p = k / 10.0;
      const Instance inst = generate_instance(n, p, 100 + n * 11 + k);
      EXPECT_EQ(count_negative(inst.Q), static_cast<int>(std::floor(p * n + 1e-9)))
          << "n=" << n << " p=" << p;
      EXPECT_LE(inst.c.cwiseAbs().maxCoeff(), 1.0);
      EXPECT_EQ(inst.Q, inst.Q.transpose());
      ASSERT_TRUE(inst.meta.has_value());
      EXPECT_EQ(inst.meta->p, p);
    }
  }
}

TEST(Instance, NegativeCountRoundsShortDecimals) {
  EXPECT_EQ(negative_eigenvalue_count(10, 0.3), 3);
  EXPECT_EQ(negative_eigenvalue_count(10, 0.7), 7);
  EXPECT_EQ(negative_eigenvalue_count(7, 0.5), 3);
  EXPECT_EQ(negative_eigenvalue_count(20, 1.0), 20);
}

TEST(Instance, GeneratorRejectsBadParameters) {
  EXPECT_THROW(generate_instance(0, 0.5, 1), ParameterError);
  EXPECT_THROW(generate_instance(3, -0.1, 1), ParameterError);
  EXPECT_THROW(generate_instance(3, 1.5, 1), ParameterError);
}

TEST(Instance, BoxProfiles) {
  EXPECT_EQ(BoxProfile::parse("ternary"), BoxProfile::ternary());
  EXPECT_EQ(BoxProfile::parse("pm5"), BoxProfile::pm5());
  EXPECT_EQ(BoxProfile::parse("custom:0:3"), (BoxProfile{0, 3}));
  EXPECT_THROW(BoxProfile::parse("custom:2:2"), ParameterError);
  EXPECT_THROW(BoxProfile::parse("wide"), ParameterError);
  const Instance inst = generate_instance(4, 0.5, 3, BoxProfile::pm5());
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(inst.l[i], -5);
    EXPECT_EQ(inst.u[i], 5);
  }
  EXPECT_DOUBLE_EQ(inst.box_size(), 11.0 * 11 * 11 * 11);
}

TEST(RandomOrthogonal, OneByOne) {
  Xoshiro256 rng(3);
  for (int t = 0; t < 10; ++t) {
    const Eigen::MatrixXd U = random_orthogonal(1, rng);
    EXPECT_EQ(std::abs(U(0, 0)), 1.0);
  }
}

TEST(RandomOrthogonal, Orthonormal) {
  Xoshiro256 rng(9);
  const Eigen::MatrixXd U = random_orthogonal(5, rng);
  const Eigen::MatrixXd E = U.transpose() * U - Eigen::MatrixXd::Identity(5, 5);
  EXPECT_LE(E.cwiseAbs().maxCoeff(), 1e-10);
}

TEST(RandomOrthogonal, Deterministic) {
  Xoshiro256 a(42), b(42);
  EXPECT_EQ(random_orthogonal(3, a), random_orthogonal(3, b));
}

TEST(RandomOrthogonal, HaarFirstEntryIsSymmetric) {
  // Under Haar measure U(0,0) is symmetric about zero; an unfixed QR sign
  // convention would bias it.
  Xoshiro256 rng(77);
  double sum = 0.0;
  const int trials = 4000;
  for (int t = 0; t < trials; ++t) sum += random_orthogonal(3, rng)(0, 0);
  EXPECT_LT(std::abs(sum / trials), 0.05);
}

TEST(InstanceIo, RoundTrip) {
  const Instance inst = generate_instance(10, 0.5, 1);
  const auto path = std::filesystem::temp_directory_path() / "mbqp_roundtrip.json";
  write_instance(inst, path);
  const Instance back = read_instance(path);
  EXPECT_EQ(back, inst);
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) EXPECT_EQ(back.Q(i, j), inst.Q(i, j));
  std::filesystem::remove(path);
}

TEST(InstanceIo, RejectsEqualBounds) {
  const std::string text = R"({"n":2,"Q":[1,0,0,1],"c":[0,0],"l":[0,-1],"u":[0,1]})";
  try {
    from_json(text);
    FAIL() << "accepted l = u";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.key(), "l");
    EXPECT_NE(std::string(e.what()).find("bounds not strict"), std::string::npos);
  }
}

TEST(InstanceIo, RejectsAsymmetricQ) {
  const std::string text = R"({"n":2,"Q":[1,0.001,0,1],"c":[0,0],"l":[-1,-1],"u":[1,1]})";
  try {
    from_json(text);
    FAIL() << "accepted an asymmetric Q";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.key(), "Q");
    EXPECT_NE(std::string(e.what()).find("asymmetric"), std::string::npos);
  }
}

TEST(InstanceIo, RejectsMalformedInput) {
  EXPECT_THROW(from_json("{not json"), FormatError);
  const auto key_of = [](const std::string& text) {
    try {
      from_json(text);
    } catch (const FormatError& e) {
      return e.key();
    }
    return std::string("<accepted>");
  };
  EXPECT_EQ(key_of(R"({"n":2,"Q":[1,0,0],"c":[0,0],"l":[-1,-1],"u":[1,1]})"), "Q");
  EXPECT_EQ(key_of(R"({"n":2,"Q":[1,0,0,1],"c":[0],"l":[-1,-1],"u":[1,1]})"), "c");
  EXPECT_EQ(key_of(R"({"n":2,"Q":[1,0,0,1],"c":[0,0],"l":[-1.5,-1],"u":[1,1]})"), "l");
  EXPECT_EQ(key_of(R"({"n":2,"Q":[1,0,0,1],"c":[0,0],"l":[-1,-1]})"), "u");
}

TEST(InstanceIo, OptionalMeta) {
  const Instance inst = from_json(R"({"n":1,"Q":[-1],"c":[0],"l":[-1],"u":[1]})");
  EXPECT_FALSE(inst.meta.has_value());
  EXPECT_EQ(from_json(to_json(inst)), inst);
}

TEST(Instance, MakeInstanceSymmetrizes) {
  Eigen::MatrixXd Q(2, 2);
  Q << 1, 2, 0, 1;
  const Instance inst = make_instance(Q, Eigen::VectorXd::Zero(2), {-1, -1}, {1, 1});
  EXPECT_EQ(inst.Q(0, 1), 1.0);
  EXPECT_EQ(inst.Q(1, 0), 1.0);
  EXPECT_THROW(make_instance(Q, Eigen::VectorXd::Zero(2), {1, -1}, {1, 1}), ParameterError);
}

}  // namespace
}  // namespace mbqp

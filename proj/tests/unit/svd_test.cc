// Copyright 2026 The dpcdr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "dpcdr/svd.h"

#include <gtest/gtest.h>

#include "dpcdr/error.h"
#include "dpcdr/rng.h"

namespace dpcdr {
namespace {

Eigen::MatrixXd random_matrix(int rows, int cols, std::uint64_t seed) {
  RandomStream s(seed);
  Eigen::MatrixXd a(rows, cols);
  for (auto& v : a.reshaped()) v = s.normal();
  return a;
}

void expect_valid_svd(const Eigen::MatrixXd& a) {
  const SvdResult svd = jacobi_svd(a);
  const auto k = std::min(a.rows(), a.cols());
  ASSERT_EQ(svd.singular_values.size(), k);
  const Eigen::MatrixXd recon = svd.u * svd.singular_values.asDiagonal() * svd.v.transpose();
  EXPECT_LT((recon - a).norm(), 1e-10 * (1.0 + a.norm()));
  EXPECT_LT((svd.u.transpose() * svd.u - Eigen::MatrixXd::Identity(k, k)).norm(), 1e-10);
  EXPECT_LT((svd.v.transpose() * svd.v - Eigen::MatrixXd::Identity(k, k)).norm(), 1e-10);
  for (Eigen::Index i = 0; i < k; ++i) {
    EXPECT_GE(svd.singular_values(i), 0.0);
    if (i > 0) {
      EXPECT_GE(svd.singular_values(i - 1), svd.singular_values(i));
    }
  }
  // Independent oracle: Eigen's bidiagonal divide-and-conquer SVD.
  const Eigen::BDCSVD<Eigen::MatrixXd> ref(a);
  EXPECT_LT((svd.singular_values - ref.singularValues()).norm(),
            1e-10 * (1.0 + ref.singularValues().norm()));
}

TEST(JacobiSvd, TallWideAndSquare) {
  expect_valid_svd(random_matrix(12, 5, 1));
  expect_valid_svd(random_matrix(5, 12, 2));
  expect_valid_svd(random_matrix(9, 9, 3));
}

TEST(JacobiSvd, RankDeficientCompletesBasis) {
  Eigen::MatrixXd a = random_matrix(8, 3, 4);
  a.col(2) = a.col(0) * 2.0;  // rank 2
  expect_valid_svd(a);
  expect_valid_svd(Eigen::MatrixXd::Zero(4, 3));
}

TEST(JacobiSvd, CompletesSingleNullDirectionOfCenteredMatrix) {
  // Centering the columns puts the all-ones vector in the left null space,
  // so exactly one left singular vector has to be completed in R^20.
  Eigen::MatrixXd a = random_matrix(20, 20, 5);
  a.rowwise() -= a.colwise().mean();
  expect_valid_svd(a);
  expect_valid_svd(a.transpose());
}

TEST(JacobiSvd, DiagonalOracle) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3, 3);
  a(0, 0) = 1.0;
  a(1, 1) = -4.0;
  a(2, 2) = 2.0;
  const SvdResult svd = jacobi_svd(a);
  EXPECT_NEAR(svd.singular_values(0), 4.0, 1e-14);
  EXPECT_NEAR(svd.singular_values(1), 2.0, 1e-14);
  EXPECT_NEAR(svd.singular_values(2), 1.0, 1e-14);
  EXPECT_NEAR(spectral_norm(a), 4.0, 1e-14);
}

TEST(JacobiSvd, RejectsNonFinite) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Ones(2, 2);
  a(0, 1) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(jacobi_svd(a), DomainError);
}

}  // namespace
}  // namespace dpcdr

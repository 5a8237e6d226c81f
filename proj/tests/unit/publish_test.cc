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
#include "dpcdr/publish.h"

#include <bit>
#include <cmath>

#include <gtest/gtest.h>

#include "dpcdr/error.h"
#include "dpcdr/fwht.h"
#include "dpcdr/verify.h"

namespace dpcdr {
namespace {

Eigen::MatrixXd hadamard(int n) {
  Eigen::MatrixXd h(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      h(i, j) = (std::popcount(static_cast<unsigned>(i & j)) % 2 ? -1.0 : 1.0) / std::sqrt(n);
    }
  }
  return h;
}

Eigen::MatrixXd gaussian(int rows, int cols, std::uint64_t seed) {
  RandomStream s(seed);
  Eigen::MatrixXd a(rows, cols);
  for (auto& v : a.reshaped()) v = s.normal();
  return a;
}

TEST(DerivePlan, ProjectedDimensionOracle) {
  PublishParams p;
  p.mu = 2.0 / std::exp(1.0);
  p.eta = 1.0;
  EXPECT_EQ(derive_plan(p).n1_prime, 8);  // ceil(8 ln(e) / 1)
  p.mu = 0.1;
  p.eta = 0.5;
  EXPECT_EQ(derive_plan(p).n1_prime, 96);  // ceil(95.86)
  p.n1_prime_override = 400;
  EXPECT_EQ(derive_plan(p).n1_prime, 400);
}

TEST(DerivePlan, ClosedFormNoiseOracle) {
  // sqrt(32 * 8 * ln 200) * ln 3200, evaluated at 40 digits.
  EXPECT_NEAR(closed_form_w(1.0, 0.01, 8), 297.2427434369544408538, 1e-9);
  PublishParams p;
  p.epsilon = 1.0;
  p.delta = 0.01;
  p.n1_prime_override = 8;
  EXPECT_NEAR(derive_plan(p).w, 297.2427434369544408538, 1e-9);
  // w scales as 1 / epsilon.
  EXPECT_NEAR(closed_form_w(4.0, 0.01, 8), 297.2427434369544408538 / 4.0, 1e-9);
}

TEST(DerivePlan, PerRowBudgetOracle) {
  const RowBudget b = per_row_budget(8.0, 0.01, 64);
  EXPECT_NEAR(b.epsilon0, 0.21722060550150095709, 1e-14);
  EXPECT_NEAR(b.delta0, 0.000078125, 1e-18);
  EXPECT_NEAR(per_row_bound_w(8.0, 0.01, 64), 100.82872654393298459, 1e-8);
  PublishParams p;
  p.epsilon = 8.0;
  p.n1_prime_override = 64;
  p.calibration = NoiseCalibration::kPerRowBound;
  EXPECT_NEAR(derive_plan(p).w, 100.82872654393298459, 1e-8);
}

TEST(PublishParams, Validation) {
  auto bad = [](auto mutate) {
    PublishParams p;
    mutate(p);
    EXPECT_THROW(p.validate(), DomainError);
  };
  bad([](PublishParams& p) { p.epsilon = 0.0; });
  bad([](PublishParams& p) { p.delta = 1.0; });
  bad([](PublishParams& p) { p.delta = 0.0; });
  bad([](PublishParams& p) { p.eta = -1.0; });
  bad([](PublishParams& p) { p.mu = 2.0; });
  bad([](PublishParams& p) { p.q = 0.0; });
  bad([](PublishParams& p) { p.q = 1.5; });
  bad([](PublishParams& p) { p.n1_prime_override = 0; });
  EXPECT_NO_THROW(PublishParams{}.validate());
}

TEST(PerturbSingularValues, LiftsEverySingularValue) {
  for (auto [rows, cols] : {std::pair{10, 4}, std::pair{4, 10}, std::pair{6, 6}}) {
    const Eigen::MatrixXd a = gaussian(rows, cols, 7);
    const double w = 1.7;
    const Eigen::MatrixXd b = perturb_singular_values(a, w);
    ASSERT_EQ(b.rows(), rows);
    ASSERT_EQ(b.cols(), cols);
    const Eigen::VectorXd sa = Eigen::BDCSVD<Eigen::MatrixXd>(a).singularValues();
    const Eigen::VectorXd sb = Eigen::BDCSVD<Eigen::MatrixXd>(b).singularValues();
    for (Eigen::Index i = 0; i < sa.size(); ++i) {
      EXPECT_NEAR(sb(i), std::sqrt(sa(i) * sa(i) + w * w), 1e-10);
    }
  }
}

TEST(PerturbSingularValues, ZeroNoiseIsIdentity) {
  const Eigen::MatrixXd a = gaussian(7, 5, 8);
  EXPECT_LT((perturb_singular_values(a, 0.0) - a).norm(), 1e-10);
}

TEST(PerturbedItemUserMatrix, GramMatchesRowCovarianceWhenUsersFewer) {
  const Eigen::MatrixXd r = random_rating_matrix(6, 10, RandomStream(3)).values();
  const double w = 2.5;
  const Eigen::MatrixXd r1 = perturbed_item_user_matrix(r, w);
  EXPECT_EQ(r1.rows(), 10);
  EXPECT_EQ(r1.cols(), 6);
  EXPECT_LT((r1.transpose() * r1 - row_covariance(r, w)).norm(), 1e-9);
}

TEST(GaussianJlt, DeterministicWithUnitVariance) {
  const Eigen::MatrixXd a = gaussian_jlt_matrix(64, 128, RandomStream(5));
  const Eigen::MatrixXd b = gaussian_jlt_matrix(64, 128, RandomStream(5));
  EXPECT_EQ(a, b);
  EXPECT_NEAR(a.mean(), 0.0, 0.02);
  EXPECT_NEAR(a.squaredNorm() / static_cast<double>(a.size()), 1.0, 0.03);
}

TEST(SparseProjection, DensityAndScale) {
  const double q = 0.05;
  const SparseProjection p = draw_sparse_projection(200, 1000, q, RandomStream(6));
  const double total = 200.0 * 1000.0;
  // nnz ~ Binomial(2e5, 0.05): sd ~ 97.
  EXPECT_NEAR(static_cast<double>(p.nonZeros()), q * total, 500.0);
  // E[P_ij^2] = q * (1/q) = 1.
  EXPECT_NEAR(Eigen::MatrixXd(p).squaredNorm() / total, 1.0, 0.03);
  const SparseProjection dense = draw_sparse_projection(4, 8, 1.0, RandomStream(6));
  EXPECT_EQ(dense.nonZeros(), 32);
}

TEST(Signs, PlusMinusOne) {
  const Eigen::VectorXd d = draw_signs(1000, RandomStream(2));
  for (double v : d) EXPECT_TRUE(v == 1.0 || v == -1.0);
  EXPECT_NEAR(d.sum(), 0.0, 150.0);
}

TEST(Sjlt, MatchesExplicitDenseProduct) {
  const RandomStream stream(21);
  for (double q : {0.3, 1.0}) {
    const Eigen::MatrixXd r1 = gaussian(32, 5, 9);
    const Eigen::MatrixXd got = sjlt_apply(r1, 12, q, stream);
    const Eigen::VectorXd d = draw_signs(32, stream.substream(StreamTag::kSigns));
    const Eigen::MatrixXd p =
        Eigen::MatrixXd(draw_sparse_projection(12, 32, q, stream.substream(StreamTag::kSparseProjection)));
    const Eigen::MatrixXd expected = p * hadamard(32) * d.asDiagonal() * r1;
    EXPECT_LT((got - expected).norm(), 1e-8 * (1.0 + expected.norm())) << "q=" << q;
  }
}

TEST(Sjlt, HooksRemoveSignsAndHadamard) {
  const RandomStream stream(22);
  const Eigen::MatrixXd r1 = gaussian(16, 3, 10);
  const Eigen::MatrixXd got = sjlt_apply(r1, 8, 0.5, stream, {true, true});
  const Eigen::MatrixXd p = Eigen::MatrixXd(
      draw_sparse_projection(8, 16, 0.5, stream.substream(StreamTag::kSparseProjection)));
  EXPECT_LT((got - p * r1).norm(), 1e-12 * (1.0 + got.norm()));
}

TEST(Sjlt, RejectsNonPowerOfTwoInput) {
  EXPECT_THROW(sjlt_apply(gaussian(12, 2, 1), 4, 0.5, RandomStream(1)), DomainError);
}

TEST(RandomTransform, JltIsScaledGaussianProduct) {
  const RandomStream stream(30);
  const Eigen::MatrixXd r1 = gaussian(20, 4, 11);
  PublishParams params;
  const Eigen::MatrixXd got = random_transform(r1, 16, params, stream);
  const Eigen::MatrixXd m =
      gaussian_jlt_matrix(16, 20, stream.substream(StreamTag::kGaussianProjection));
  EXPECT_LT((got - m * r1 / 4.0).norm(), 1e-12 * (1.0 + got.norm()));
}

TEST(RandomTransform, SjltZeroPadsItems) {
  const RandomStream stream(31);
  const Eigen::MatrixXd r1 = gaussian(20, 4, 12);
  PublishParams params;
  params.transform_kind = TransformKind::kSjlt;
  Eigen::MatrixXd padded = Eigen::MatrixXd::Zero(32, 4);
  padded.topRows(20) = r1;
  const Eigen::MatrixXd got = random_transform(r1, 16, params, stream);
  const Eigen::MatrixXd expected = sjlt_apply(padded, 16, params.q, stream) / 4.0;
  EXPECT_LT((got - expected).norm(), 1e-12 * (1.0 + got.norm()));
}

TEST(Publish, ShapeMetadataAndDeterminism) {
  const RatingMatrix r = random_rating_matrix(30, 20, RandomStream(4));
  for (TransformKind kind : {TransformKind::kJlt, TransformKind::kSjlt}) {
    PublishParams params;
    params.epsilon = 8.0;
    params.n1_prime_override = 24;
    params.transform_kind = kind;
    params.seed = 77;
    const PublishedMatrix a = publish(r, params);
    const PublishedMatrix b = publish(r, params);
    EXPECT_EQ(a.values.rows(), 30);
    EXPECT_EQ(a.values.cols(), 24);
    EXPECT_EQ(a.values, b.values);
    EXPECT_EQ(a.plan.n1_prime, 24);
    EXPECT_DOUBLE_EQ(a.plan.w, closed_form_w(8.0, 0.01, 24));
    EXPECT_EQ(a.padded_n, kind == TransformKind::kSjlt ? 32 : 20);
    EXPECT_EQ(a.source_users, 30);
    EXPECT_EQ(a.source_items, 20);
    EXPECT_EQ(a.user_ids, r.user_ids());
    params.seed = 78;
    EXPECT_NE(publish(r, params).values, a.values);
  }
}

TEST(Publish, OutputIsProjectionOfPerturbedMatrix) {
  const RatingMatrix r = random_rating_matrix(8, 16, RandomStream(5));
  PublishParams params;
  params.epsilon = 2.0;
  params.n1_prime_override = 10;
  params.seed = 3;
  const PublishedMatrix out = publish(r, params);
  const Eigen::MatrixXd r1 = perturbed_item_user_matrix(r.values(), out.plan.w);
  const Eigen::MatrixXd expected =
      random_transform(r1, 10, params, RandomStream(params.seed)).transpose();
  EXPECT_LT((out.values - expected).norm(), 1e-9 * (1.0 + expected.norm()));
}

}  // namespace
}  // namespace dpcdr

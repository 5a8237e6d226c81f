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
#include "dpcdr/verify.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "dpcdr/error.h"
#include "dpcdr/fwht.h"
#include "dpcdr/svd.h"

namespace dpcdr {
namespace {

TrialConfig small_config(int trials) {
  TrialConfig cfg;
  cfg.trials = trials;
  cfg.seed = 5;
  cfg.params.epsilon = 8.0;
  return cfg;
}

TEST(Compose, AdvancedCompositionOracle) {
  // sqrt(200 ln 1e6) * 0.01 + 100 * 0.01 * (e^0.01 - 1), evaluated at 40 digits.
  const ComposedBudget b = compose_epsilon(0.01, 1e-8, 100, 1e-6);
  EXPECT_NEAR(b.epsilon, 0.53570234405986125541, 1e-14);
  EXPECT_NEAR(b.delta, 100 * 1e-8 + 1e-6, 1e-20);
  EXPECT_THROW(compose_epsilon(0.0, 1e-8, 100, 1e-6), DomainError);
  EXPECT_THROW(compose_epsilon(0.01, 1e-8, 0, 1e-6), DomainError);
}

TEST(Compose, MonotoneInK) {
  double prev = 0.0;
  for (int k = 1; k <= 64; k *= 2) {
    const double e = compose_epsilon(0.05, 1e-6, k, 1e-5).epsilon;
    EXPECT_GT(e, prev);
    prev = e;
  }
}

TEST(GaussianLogPdf, MatchesClosedFormDiagonal) {
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(2, 2);
  c(0, 0) = 4.0;
  c(1, 1) = 0.25;
  Eigen::VectorXd y(2);
  y << 1.0, -0.5;
  const double expected = -std::log(2.0 * std::numbers::pi) - 0.5 * std::log(1.0) -
                          0.5 * (1.0 / 4.0 + 0.25 / 0.25);
  EXPECT_NEAR(gaussian_log_pdf(y, c), expected, 1e-14);
  c(1, 1) = -1.0;
  EXPECT_THROW(gaussian_log_pdf(y, c), NumericError);
}

TEST(RowCovariance, IsCenteredGramPlusNoise) {
  const Eigen::MatrixXd r = random_rating_matrix(5, 3, RandomStream(2)).values();
  const Eigen::MatrixXd c = row_covariance(r, 1.5);
  const Eigen::MatrixXd rc = center_by_item_mean(r).values;
  EXPECT_LT((c - rc * rc.transpose() - 2.25 * Eigen::MatrixXd::Identity(5, 5)).norm(), 1e-12);
}

TEST(PrivacyLossTail, IdenticalInputsHaveNoLoss) {
  const Eigen::MatrixXd r = random_rating_matrix(4, 4, RandomStream(3)).values();
  EXPECT_EQ(privacy_loss_tail(r, r, 2.0, 1e-9, 5000, RandomStream(1)), 0.0);
}

TEST(PrivacyLossTail, SmallNoiseLeaksAndLargeNoiseHides) {
  // Two items leave a null direction of Rc Rc^T besides the all-ones
  // vector, which the neighbour moves.
  const RatingMatrix r = random_rating_matrix(4, 2, RandomStream(4));
  const RatingMatrix rp = make_neighbour(r, {0, 0, 0.5});
  const double loud = privacy_loss_tail(r.values(), rp.values(), 0.05, 0.1, 4000, RandomStream(2));
  const double quiet = privacy_loss_tail(r.values(), rp.values(), 50.0, 0.1, 4000, RandomStream(2));
  EXPECT_GT(loud, 0.5);
  EXPECT_EQ(quiet, 0.0);
}

TEST(Checks, CovarianceGapWithinBound) {
  const CheckReport r = check_covariance_gap(small_config(100));
  EXPECT_TRUE(r.pass) << r.notes;
  EXPECT_LE(r.observed, r.bound * (1.0 + 1e-9));
  EXPECT_EQ(r.trials_used, 0);
}

TEST(Checks, ExpectationApproxPasses) {
  const CheckReport r = check_expectation_approx(small_config(500));
  EXPECT_TRUE(r.pass) << r.observed << " > " << r.bound;
  EXPECT_NEAR(r.bound, 0.05 * std::sqrt(10.0), 1e-12);
}

TEST(Checks, TooFewTrialsNeverPass) {
  const CheckReport r = check_expectation_approx(small_config(kMinTrials - 1));
  EXPECT_FALSE(r.pass);
  EXPECT_NE(r.notes.find(std::to_string(kMinTrials)), std::string::npos);
}

TEST(Checks, ResultsDoNotDependOnThreadCount) {
  TrialConfig a = small_config(150);
  TrialConfig b = a;
  b.threads = 3;
  const CheckReport ra = check_expectation_approx(a);
  const CheckReport rb = check_expectation_approx(b);
  EXPECT_EQ(ra.observed, rb.observed);
  a.params.n1_prime_override = 32;
  b.params.n1_prime_override = 32;
  EXPECT_EQ(check_rip(a, 0.2).observed, check_rip(b, 0.2).observed);
}

TEST(Checks, RipBandFractionAndTail) {
  TrialConfig cfg = small_config(200);
  cfg.params.n1_prime_override = 256;
  for (TransformKind kind : {TransformKind::kJlt, TransformKind::kSjlt}) {
    cfg.params.transform_kind = kind;
    const CheckReport rip = check_rip(cfg, 0.2);
    EXPECT_TRUE(rip.pass) << to_string(kind) << " " << rip.observed;
    EXPECT_GE(rip.observed, 0.0);
    EXPECT_LE(rip.observed, 1.0);
    EXPECT_TRUE(check_rip_tail(cfg, 0.2).pass);
  }
}

TEST(Checks, PreconditionerOneHot) {
  TrialConfig cfg = small_config(200);
  cfg.users = 16;
  cfg.items = 256;
  const CheckReport r = check_preconditioner(cfg);
  EXPECT_TRUE(r.pass) << r.observed;
  EXPECT_EQ(r.bound, cfg.confidence);
  cfg.items = 100;
  EXPECT_THROW(check_preconditioner(cfg), DomainError);
}

TEST(Checks, PreconditionerExplicitVectors) {
  TrialConfig cfg = small_config(200);
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(64, 2);
  x(3, 0) = 1.0;
  x(10, 1) = -2.0;
  const CheckReport r = check_preconditioner(cfg, x);
  // Any sign flip of a one-hot vector gives a flat +-n^{-1/2} row.
  EXPECT_EQ(r.observed, 1.0);
  EXPECT_TRUE(r.pass);
}

TEST(Checks, PrivacyNeedsTinyMatrices) {
  TrialConfig cfg = small_config(100);
  EXPECT_THROW(check_privacy_loss_tail(cfg, {0, 0, 0.5}), DomainError);
  cfg.users = 6;
  cfg.items = 4;
  const CheckReport r = check_privacy_loss_tail(cfg, {0, 0, 0.5});
  EXPECT_EQ(r.name, "privacy_loss_tail");
  EXPECT_GT(r.bound, 0.0);
}

TEST(Suite, EnumeratesChecksAndRejectsUnknown) {
  TrialConfig cfg = small_config(100);
  cfg.params.n1_prime_override = 64;
  const std::vector<CheckReport> all = run_suite("all", cfg);
  EXPECT_GE(all.size(), 4u);
  EXPECT_EQ(run_suite("privacy", cfg).size(), 1u);
  EXPECT_THROW(run_suite("everything", cfg), DomainError);
}

TEST(Report, JsonLineKeysInOrder) {
  CheckReport r{"rip_jlt", 0.97, 0.95, true, 1000, "note"};
  EXPECT_EQ(to_json_line(r),
            R"({"name":"rip_jlt","observed":0.97,"bound":0.95,"pass":true,"trials_used":1000,"notes":"note"})");
  std::ostringstream out;
  write_reports_jsonl(out, {r, r});
  const std::string text = out.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2);
}

TEST(TrialConfig, Validation) {
  TrialConfig cfg;
  cfg.trials = 0;
  EXPECT_THROW(cfg.validate(), DomainError);
  cfg = TrialConfig{};
  cfg.confidence = 1.0;
  EXPECT_THROW(cfg.validate(), DomainError);
  cfg = TrialConfig{};
  cfg.threads = 0;
  EXPECT_THROW(cfg.validate(), DomainError);
}

}  // namespace
}  // namespace dpcdr

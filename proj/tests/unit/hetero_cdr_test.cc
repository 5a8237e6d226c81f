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
#include "dpcdr/hetero_cdr.h"

#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "../support/gradient_check.h"
#include "dpcdr/error.h"

namespace dpcdr {
namespace {

using testing::check_gradients;
using testing::make_gradient_fixture;

TEST(Variant, NamesRoundTrip) {
  for (ModelVariant v : {ModelVariant::kHetero, ModelVariant::kSymmetric, ModelVariant::kTargetOnly}) {
    EXPECT_EQ(parse_model_variant(to_string(v)), v);
  }
  EXPECT_EQ(parse_model_variant("target-only-dmf"), ModelVariant::kTargetOnly);
  EXPECT_THROW(parse_model_variant("bpr"), DomainError);
}

TEST(Model, NetsPerVariant) {
  const ModelShape shape{10, 8, 6, 4, {5}};
  EXPECT_EQ(make_model(ModelVariant::kHetero, shape, 1).nets().size(), 4u);
  EXPECT_EQ(make_model(ModelVariant::kSymmetric, shape, 1).nets().size(), 4u);
  EXPECT_EQ(make_model(ModelVariant::kTargetOnly, shape, 1).nets().size(), 2u);
  const HeteroModel sym = make_model(ModelVariant::kSymmetric, shape, 1);
  EXPECT_EQ(sym.target_decoder.output_activation(), OutputActivation::kSigmoid);
}

struct Component {
  const char* name;
  LossWeights weights;
};

TEST(Gradients, EveryComponentMatchesFiniteDifferences) {
  const Component components[] = {{"rec", {1, 0, 0}}, {"reg", {0, 1, 0}},
                                  {"ali", {0, 0, 1}}, {"total", {1, 1, 1}}};
  for (ModelVariant v : {ModelVariant::kHetero, ModelVariant::kSymmetric, ModelVariant::kTargetOnly}) {
    auto f = make_gradient_fixture(v, 11);
    ASSERT_GE(f.model.parameter_count(), 200u);
    for (const Component& c : components) {
      if (v == ModelVariant::kTargetOnly && c.weights.reg == 0.0) continue;
      const auto r = check_gradients(f, 100.0, c.weights, 200, 3);
      EXPECT_EQ(r.failed, 0) << to_string(v) << " " << c.name << " worst " << r.worst;
      EXPECT_EQ(r.checked, 200);
    }
  }
}

TEST(Loss, TargetOnlyHasNoSourceTerms) {
  auto f = make_gradient_fixture(ModelVariant::kTargetOnly, 2);
  const LossBreakdown l = batch_loss(f.model, f.data, f.batch, 100.0, nullptr);
  EXPECT_EQ(l.rec, 0.0);
  EXPECT_EQ(l.ali, 0.0);
  EXPECT_GT(l.reg, 0.0);
  EXPECT_DOUBLE_EQ(l.total, l.reg);
}

TEST(Loss, TotalCombinesComponents) {
  auto f = make_gradient_fixture(ModelVariant::kHetero, 3);
  const LossBreakdown l = batch_loss(f.model, f.data, f.batch, 7.0, nullptr);
  EXPECT_DOUBLE_EQ(l.total, l.rec + l.reg + 7.0 * l.ali);
  EXPECT_DOUBLE_EQ(total_loss(l, 7.0), l.total);
  EXPECT_NEAR(l.rec, loss_rec(f.model, f.data.published), 1e-9 * l.rec);
}

TEST(Loss, AlignOracle) {
  Eigen::MatrixXd a(2, 2), b(2, 2);
  a << 1, 2, 3, 4;
  b << 1, 0, 0, 4;
  EXPECT_DOUBLE_EQ(loss_align(a, b), 4.0 + 9.0);
  EXPECT_THROW(loss_align(a, Eigen::MatrixXd::Zero(3, 2)), ShapeError);
}

TEST(Cosine, ClampedAndDegenerate) {
  Eigen::VectorXd x(2), y(2);
  x << 1, 0;
  y << 0, 3;
  EXPECT_DOUBLE_EQ(clamped_cosine(x, y), kPredictionClamp);
  EXPECT_DOUBLE_EQ(clamped_cosine(x, 2.0 * x), 1.0 - kPredictionClamp);
  EXPECT_DOUBLE_EQ(clamped_cosine(x, -x), kPredictionClamp);
  Eigen::VectorXd z(2);
  z << 1, 1;
  EXPECT_NEAR(clamped_cosine(x, z), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_THROW(clamped_cosine(x, Eigen::VectorXd::Zero(2)), DegenerateInputError);
}

TEST(Predict, MatchesScoreMatrix) {
  auto f = make_gradient_fixture(ModelVariant::kHetero, 4);
  const Eigen::MatrixXd s = score_matrix(f.model, f.data);
  EXPECT_EQ(s.rows(), f.data.target.rows());
  EXPECT_EQ(s.cols(), f.data.target.cols());
  for (int i : {0, 5, 11}) {
    for (int j : {0, 7, 19}) {
      EXPECT_NEAR(predict_target(f.model, f.data.target, i, j), s(i, j), 1e-12);
    }
  }
  Eigen::MatrixXd empty_row = f.data.target;
  empty_row.row(2).setZero();
  EXPECT_THROW(predict_target(f.model, empty_row, 2, 0), DegenerateInputError);
}

TEST(Shapes, MismatchesAreRejected) {
  auto f = make_gradient_fixture(ModelVariant::kHetero, 5);
  CdrData bad = f.data;
  bad.published = Eigen::MatrixXd::Ones(f.data.published.rows() - 1, f.data.published.cols());
  EXPECT_THROW(validate_shapes(f.model, bad), ShapeError);
  bad = f.data;
  bad.target = Eigen::MatrixXd::Ones(f.data.target.rows(), f.data.target.cols() + 1);
  EXPECT_THROW(score_matrix(f.model, bad), ShapeError);
}

TEST(NormalizePublished, UnitRms) {
  Eigen::MatrixXd p(2, 2);
  p << 3, -3, 3, 3;
  const Eigen::MatrixXd n = normalize_published(p);
  EXPECT_NEAR(std::sqrt(n.squaredNorm() / 4.0), 1.0, 1e-15);
  EXPECT_EQ(normalize_published(Eigen::MatrixXd::Zero(2, 3)), Eigen::MatrixXd::Zero(2, 3));
}

TrainConfig quick_train() {
  TrainConfig cfg;
  cfg.epochs = 4;
  cfg.batch_size = 5;
  cfg.alpha = 1.0;
  cfg.adam.learning_rate = 5e-3;
  cfg.seed = 9;
  return cfg;
}

TEST(Train, DeterministicAndLossDecreases) {
  for (ModelVariant v : {ModelVariant::kHetero, ModelVariant::kSymmetric, ModelVariant::kTargetOnly}) {
    auto a = make_gradient_fixture(v, 6);
    auto b = make_gradient_fixture(v, 6);
    const auto ta = train(a.model, a.data, quick_train());
    const auto tb = train(b.model, b.data, quick_train());
    ASSERT_EQ(ta.size(), 4u);
    for (std::size_t e = 0; e < ta.size(); ++e) {
      EXPECT_EQ(ta[e].total, tb[e].total);
      EXPECT_EQ(ta[e].epoch, static_cast<int>(e) + 1);
    }
    EXPECT_LT(ta.back().total, ta.front().total) << to_string(v);
    EXPECT_EQ(score_matrix(a.model, a.data), score_matrix(b.model, b.data));
  }
}

TEST(Train, ConfigValidation) {
  TrainConfig cfg;
  cfg.batch_size = 0;
  EXPECT_THROW(cfg.validate(), DomainError);
  cfg = TrainConfig{};
  cfg.alpha = -1.0;
  EXPECT_THROW(cfg.validate(), DomainError);
  cfg = TrainConfig{};
  cfg.epochs = -1;
  EXPECT_THROW(cfg.validate(), DomainError);
}

TEST(Trace, CsvLayout) {
  std::ostringstream out;
  write_trace_csv(out, {{1, 1.5, 2.0, 0.25, 28.5}});
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "epoch,l_rec,l_reg,l_ali,total");
  EXPECT_NE(out.str().find("1,1.5,2,0.25,28.5"), std::string::npos);
}

TEST(Checkpoint, RoundTripPreservesScores) {
  for (ModelVariant v : {ModelVariant::kHetero, ModelVariant::kSymmetric, ModelVariant::kTargetOnly}) {
    auto f = make_gradient_fixture(v, 7);
    train(f.model, f.data, quick_train());
    std::stringstream buf;
    write_checkpoint(buf, f.model);
    const HeteroModel back = read_checkpoint(buf);
    EXPECT_EQ(back.variant, v);
    EXPECT_EQ(back.seed, f.model.seed);
    EXPECT_EQ(back.h, f.model.h);
    EXPECT_EQ(back.parameter_count(), f.model.parameter_count());
    EXPECT_EQ(score_matrix(back, f.data), score_matrix(f.model, f.data));
  }
}

TEST(Checkpoint, RejectsCorruptStreams) {
  auto f = make_gradient_fixture(ModelVariant::kHetero, 8);
  std::ostringstream out;
  write_checkpoint(out, f.model);
  std::string bytes = out.str();
  EXPECT_EQ(bytes.substr(0, 8), "DPCDRCKP");
  std::istringstream truncated(bytes.substr(0, bytes.size() / 2));
  EXPECT_THROW(read_checkpoint(truncated), IoError);
  bytes[1] = 'X';
  std::istringstream bad(bytes);
  EXPECT_THROW(read_checkpoint(bad), IoError);
}

}  // namespace
}  // namespace dpcdr

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
#include "dpcdr/metrics.h"

#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "../support/metric_fixture.h"
#include "dpcdr/error.h"
#include "dpcdr/rng.h"

namespace dpcdr {
namespace {

TEST(MetricsAtK, RankThreeOracle) {
  const MetricsAtK m = metrics_at_k(3, 5);
  EXPECT_EQ(m.hr, 1.0);
  EXPECT_DOUBLE_EQ(m.ndcg, 0.5);
  EXPECT_DOUBLE_EQ(m.mrr, 1.0 / 3.0);
  const MetricsAtK first = metrics_at_k(1, 5);
  EXPECT_EQ(first.ndcg, 1.0);
  EXPECT_EQ(first.mrr, 1.0);
  const MetricsAtK miss = metrics_at_k(6, 5);
  EXPECT_EQ(miss.hr + miss.ndcg + miss.mrr, 0.0);
  EXPECT_THROW(metrics_at_k(0, 5), DomainError);
}

TEST(RankOfTest, TiesFavourSmallerItemIndex) {
  RankedList list{{0.5, 0.5, 0.5, 0.1}, {7, 3, 9, 1}, 0};
  EXPECT_EQ(rank_of_test(list), 2);  // item 3 ties and wins
  list.test_position = 1;
  EXPECT_EQ(rank_of_test(list), 1);
  list.test_position = 3;
  EXPECT_EQ(rank_of_test(list), 4);
  list.scores[2] = std::nan("");
  EXPECT_THROW(rank_of_test(list), DomainError);
  EXPECT_THROW(rank_of_test(RankedList{{1.0}, {1, 2}, 0}), DomainError);
  EXPECT_THROW(rank_of_test(RankedList{{1.0}, {1}, 1}), DomainError);
}

TEST(HandScoredFixture, ReproducesExactValues) {
  const Eigen::MatrixXd scores = testing::fixture_scores();
  const std::vector<int> ranks = rank_splits(scores, testing::fixture_splits());
  ASSERT_EQ(ranks, (std::vector<int>{1, 3, 12}));
  const MetricsRow row = summarize_ranks(ranks, "fixture");
  for (std::size_t c = 0; c < 6; ++c) {
    EXPECT_NEAR(row.values[c], testing::kFixtureMeans[c], 1e-15) << kMetricColumns[c];
  }
  EXPECT_EQ(row.users, 3);
}

TEST(Invariants, MonotoneInKAndOrderedPerUser) {
  RandomStream s(12);
  for (int trial = 0; trial < 2000; ++trial) {
    RankedList list;
    for (int k = 0; k < kCandidates; ++k) {
      list.scores.push_back(std::floor(s.uniform() * 20.0));  // plenty of ties
      list.items.push_back(k);
    }
    list.test_position = static_cast<int>(s.below(kCandidates));
    const int r = rank_of_test(list);
    ASSERT_GE(r, 1);
    ASSERT_LE(r, kCandidates);
    const MetricsAtK a = metrics_at_k(r, 5);
    const MetricsAtK b = metrics_at_k(r, 10);
    EXPECT_GE(b.hr, a.hr);
    EXPECT_GE(b.ndcg, a.ndcg);
    EXPECT_GE(b.mrr, a.mrr);
    for (const MetricsAtK& m : {a, b}) {
      EXPECT_LE(m.mrr, m.ndcg);
      EXPECT_LE(m.ndcg, m.hr);
      EXPECT_GE(m.mrr, 0.0);
      EXPECT_LE(m.hr, 1.0);
    }
  }
}

TEST(Invariants, StrictlyMonotoneTransformKeepsRanks) {
  RandomStream s(13);
  for (int trial = 0; trial < 200; ++trial) {
    RankedList list;
    for (int k = 0; k < 30; ++k) {
      list.scores.push_back(s.normal());
      list.items.push_back(k);
    }
    list.test_position = static_cast<int>(s.below(30));
    RankedList mapped = list;
    for (double& v : mapped.scores) v = std::exp(3.0 * v) + 2.0;
    EXPECT_EQ(rank_of_test(list), rank_of_test(mapped));
  }
}

TEST(CandidateList, TestItemFirst) {
  const Eigen::MatrixXd scores = testing::fixture_scores();
  const RankedList list = candidate_list(scores, testing::fixture_splits()[1]);
  EXPECT_EQ(list.test_position, 0);
  EXPECT_EQ(list.items.size(), 12u);
  EXPECT_EQ(list.items[0], 0);
  EXPECT_EQ(list.scores[0], 0.5);
  UserSplit bad = testing::fixture_splits()[0];
  bad.negatives.push_back(99);
  EXPECT_THROW(candidate_list(scores, bad), IndexError);
}

TEST(MetricsCsv, RowsAndMean) {
  MetricsRow a{"a", {1, 1, 1, 1, 1, 1}, 1};
  MetricsRow b{"b", {0, 0, 0, 0.5, 0.25, 0.125}, 1};
  std::ostringstream out;
  write_metrics_csv(out, {a, b});
  EXPECT_EQ(out.str(),
            "run,hr@5,ndcg@5,mrr@5,hr@10,ndcg@10,mrr@10\n"
            "a,1,1,1,1,1,1\n"
            "b,0,0,0,0.5,0.25,0.125\n"
            "mean,0.5,0.5,0.5,0.75,0.625,0.5625\n");
}

TEST(Summarize, EmptyGivesZeros) {
  const MetricsRow row = summarize_ranks({}, "none");
  EXPECT_EQ(row.users, 0);
  for (double v : row.values) EXPECT_EQ(v, 0.0);
}

}  // namespace
}  // namespace dpcdr

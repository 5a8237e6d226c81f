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

// Leave-one-out ranking metrics: HR@K, NDCG@K and MRR@K with a single
// relevant item per list.

#ifndef DPCDR_METRICS_H_
#define DPCDR_METRICS_H_

#include <array>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dpcdr/dataset.h"

namespace dpcdr {

inline constexpr int kCandidates = kEvalNegatives + 1;

struct RankedList {
  std::vector<double> scores;
  std::vector<int> items;  // item index of each candidate
  int test_position = 0;   // index into scores/items of the test item
};

// 1 + number of candidates scored above the test item, counting equal
// scores with a smaller item index as above. Throws DomainError on
// non-finite scores, mismatched sizes or a bad test position.
int rank_of_test(const RankedList& list);

struct MetricsAtK {
  double hr = 0.0;
  double ndcg = 0.0;
  double mrr = 0.0;
};

// hr = [rank <= k], ndcg = [rank <= k] / log2(rank + 1), mrr = [rank <= k] / rank.
MetricsAtK metrics_at_k(int rank, int k);

// hr@5, ndcg@5, mrr@5, hr@10, ndcg@10, mrr@10.
inline constexpr std::array<const char*, 6> kMetricColumns = {"hr@5",  "ndcg@5",  "mrr@5",
                                                              "hr@10", "ndcg@10", "mrr@10"};

struct MetricsRow {
  std::string run;
  std::array<double, 6> values{};
  int users = 0;
};

// Mean metrics over per-user ranks. Empty input gives zeros.
MetricsRow summarize_ranks(const std::vector<int>& ranks, const std::string& run);

// Test-item candidate list of a split from a users x items score matrix.
RankedList candidate_list(const Eigen::MatrixXd& scores, const UserSplit& split);

// Per-user ranks of the test items.
std::vector<int> rank_splits(const Eigen::MatrixXd& scores, const std::vector<UserSplit>& splits);

// CSV: run,hr@5,...,mrr@10 then one row per run and a final "mean" row.
// Values are printed with %.17g.
void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows);

}  // namespace dpcdr

#endif  // DPCDR_METRICS_H_

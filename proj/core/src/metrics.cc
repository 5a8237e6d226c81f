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
#include <cstdio>

#include "dpcdr/error.h"

namespace dpcdr {

int rank_of_test(const RankedList& list) {
  if (list.scores.empty() || list.scores.size() != list.items.size()) {
    throw DomainError("ranked list needs one item per score");
  }
  if (list.test_position < 0 || static_cast<std::size_t>(list.test_position) >= list.scores.size()) {
    throw DomainError("test position outside the list");
  }
  const auto t = static_cast<std::size_t>(list.test_position);
  const double ts = list.scores[t];
  const int ti = list.items[t];
  int rank = 1;
  for (std::size_t k = 0; k < list.scores.size(); ++k) {
    const double s = list.scores[k];
    if (!std::isfinite(s)) throw DomainError("ranked list has a non-finite score");
    if (k == t) continue;
    if (s > ts || (s == ts && list.items[k] < ti)) ++rank;
  }
  return rank;
}

MetricsAtK metrics_at_k(int rank, int k) {
  if (rank < 1 || k < 1) throw DomainError("rank and k must be >= 1");
  if (rank > k) return {};
  return {1.0, 1.0 / std::log2(rank + 1.0), 1.0 / rank};
}

MetricsRow summarize_ranks(const std::vector<int>& ranks, const std::string& run) {
  MetricsRow row;
  row.run = run;
  row.users = static_cast<int>(ranks.size());
  if (ranks.empty()) return row;
  for (int r : ranks) {
    const MetricsAtK a = metrics_at_k(r, 5);
    const MetricsAtK b = metrics_at_k(r, 10);
    row.values[0] += a.hr;
    row.values[1] += a.ndcg;
    row.values[2] += a.mrr;
    row.values[3] += b.hr;
    row.values[4] += b.ndcg;
    row.values[5] += b.mrr;
  }
  for (double& v : row.values) v /= static_cast<double>(ranks.size());
  return row;
}

RankedList candidate_list(const Eigen::MatrixXd& scores, const UserSplit& split) {
  if (split.user < 0 || split.user >= scores.rows()) throw IndexError("split user out of range");
  RankedList list;
  list.items.reserve(split.negatives.size() + 1);
  list.items.push_back(split.test_item);
  list.items.insert(list.items.end(), split.negatives.begin(), split.negatives.end());
  for (int item : list.items) {
    if (item < 0 || item >= scores.cols()) throw IndexError("split item out of range");
    list.scores.push_back(scores(split.user, item));
  }
  list.test_position = 0;
  return list;
}

std::vector<int> rank_splits(const Eigen::MatrixXd& scores, const std::vector<UserSplit>& splits) {
  std::vector<int> ranks;
  ranks.reserve(splits.size());
  for (const UserSplit& s : splits) ranks.push_back(rank_of_test(candidate_list(scores, s)));
  return ranks;
}

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows) {
  out << "run";
  for (const char* c : kMetricColumns) out << ',' << c;
  out << '\n';
  char buf[40];
  auto emit = [&](const std::string& run, const std::array<double, 6>& values) {
    out << run;
    for (double v : values) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << ',' << buf;
    }
    out << '\n';
  };
  std::array<double, 6> mean{};
  for (const MetricsRow& r : rows) {
    emit(r.run, r.values);
    for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += r.values[k];
  }
  if (!rows.empty()) {
    for (double& v : mean) v /= static_cast<double>(rows.size());
    emit("mean", mean);
  }
}

}  // namespace dpcdr

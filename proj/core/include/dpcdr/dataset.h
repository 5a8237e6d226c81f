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

// Rating ingestion, preprocessing (binarize -> filter -> align), leave-one-out
// splits and a synthetic two-domain generator.

#ifndef DPCDR_DATASET_H_
#define DPCDR_DATASET_H_

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "dpcdr/ratings.h"

namespace dpcdr {

inline constexpr double kMaxRating = 5.0;
inline constexpr int kEvalNegatives = 99;

struct RatingTriplet {
  std::string user;
  std::string item;
  double rating = 0.0;  // in [0, 5]
};

struct RawRatings {
  std::vector<RatingTriplet> triplets;
  std::vector<std::string> warnings;
};

// CSV "user_id,item_id,rating[,timestamp]" with a header line. A repeated
// (user, item) pair keeps its last rating and adds a warning. Throws
// ParseError naming file and line on malformed rows or ratings outside
// [0, 5].
RawRatings read_ratings_csv(std::istream& in, const std::string& name = "<stream>");
RawRatings read_ratings_csv(const std::string& path);
// Writes the non-zero entries with a header, %.17g ratings.
void write_ratings_csv(std::ostream& out, const RatingMatrix& ratings);

RawRatings binarize(const RawRatings& raw, double threshold = 3.0);

// Repeatedly drops users and items with fewer than k positive (> 0)
// ratings until nothing changes. An empty result carries a warning.
RawRatings filter_min_interactions(const RawRatings& raw, int k = 5);

// Matrices over the sorted common users; each domain keeps the sorted items
// its common users rated. Throws DomainError on an empty intersection.
std::pair<RatingMatrix, RatingMatrix> align_common_users(const RawRatings& source,
                                                         const RawRatings& target);

// Triplets of every non-zero entry.
RawRatings to_raw(const RatingMatrix& ratings);

// Matrix over `users` in the given order and the sorted items they rated.
// Users without ratings get zero rows; ratings of other users are dropped.
RatingMatrix to_matrix(const RawRatings& raw, const std::vector<std::string>& users);
// Same over the sorted distinct users of raw.
RatingMatrix to_matrix(const RawRatings& raw);

struct TwoDomain {
  RatingMatrix source;
  RatingMatrix target;
  std::vector<std::string> warnings;
};

// binarize -> filter -> align, with filter and alignment repeated until
// both domains are a joint fixed point, so that re-filtering the aligned
// matrices removes nothing.
TwoDomain preprocess_two_domain(const RawRatings& source, const RawRatings& target,
                                double threshold = 3.0, int k = 5);

struct UserSplit {
  int user = 0;
  int val_item = 0;
  int test_item = 0;
  std::vector<int> negatives;
};

struct LeaveOneOut {
  std::vector<UserSplit> splits;  // ascending user index
  RatingMatrix train;             // held-out items zeroed
  std::vector<std::string> warnings;
};

// Per user (stream seed.substream(kSplit).substream(user)): validation and
// test items drawn from the positives, negatives drawn without replacement
// from the zero entries. Users with fewer than 3 positives or fewer than
// `negatives` zero entries stay in training but get no split.
LeaveOneOut make_leave_one_out(const RatingMatrix& target, std::uint64_t seed,
                               int negatives = kEvalNegatives);

// Zeroes every split's validation and test entries.
RatingMatrix apply_holdout(const RatingMatrix& target, const std::vector<UserSplit>& splits);

// One JSON object per line: {"user", "val_item", "test_item", "negatives"}
// with external ids.
void write_split_manifest(std::ostream& out, const RatingMatrix& target,
                          const std::vector<UserSplit>& splits);
// Maps ids back to indices of target. Throws ParseError on malformed lines
// or unknown ids.
std::vector<UserSplit> read_split_manifest(std::istream& in, const RatingMatrix& target,
                                           const std::string& name = "<stream>");
std::vector<UserSplit> read_split_manifest(const std::string& path, const RatingMatrix& target);

struct SynthConfig {
  int users = 500;
  int items_per_domain = 200;
  int latent_dim = 8;
  // Weight of the per-rating Gaussian perturbation of the log score.
  double noise = 0.5;
  // Log-scale spread of the non-negative latent factors.
  double latent_sigma = 1.0;
  double source_density = 0.10;
  double target_density = 0.04;
  std::uint64_t seed = 0;

  void validate() const;
};

// Shared user factors u and per-domain item factors v, all lognormal; the
// score log(u . v) + noise * xi is thresholded at the per-domain quantile
// that yields the requested density. Ratings are 0/1; user ids "u<k>",
// source items "s<k>", target items "t<k>".
TwoDomain synth_two_domain(const SynthConfig& config);

// Keeps ceil(fraction * count) of each user's positives, chosen uniformly
// (stream seed.substream(kShuffle).substream(user)); the rest become 0.
// fraction must lie in (0, 1].
RatingMatrix subsample_positives(const RatingMatrix& ratings, double fraction,
                                 std::uint64_t seed);

}  // namespace dpcdr

#endif  // DPCDR_DATASET_H_

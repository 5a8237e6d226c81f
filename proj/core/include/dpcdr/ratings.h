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

#ifndef DPCDR_RATINGS_H_
#define DPCDR_RATINGS_H_

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dpcdr {

// Dense users x items matrix of non-negative ratings with external ids.
// Immutable once constructed.
class RatingMatrix {
 public:
  // Validates: ratings finite and >= 0, ids unique, id counts match dims.
  RatingMatrix(Eigen::MatrixXd values, std::vector<std::string> user_ids,
               std::vector<std::string> item_ids);

  // Generates ids "u0", "u1", ... and "i0", "i1", ...
  static RatingMatrix from_values(Eigen::MatrixXd values);

  const Eigen::MatrixXd& values() const { return values_; }
  const std::vector<std::string>& user_ids() const { return user_ids_; }
  const std::vector<std::string>& item_ids() const { return item_ids_; }
  int users() const { return static_cast<int>(values_.rows()); }
  int items() const { return static_cast<int>(values_.cols()); }
  double operator()(int user, int item) const { return values_(user, item); }

  // Same ids, new values (validated).
  RatingMatrix with_values(Eigen::MatrixXd values) const;

 private:
  Eigen::MatrixXd values_;
  std::vector<std::string> user_ids_;
  std::vector<std::string> item_ids_;
};

// A single-entry change that turns a rating matrix into a neighbour.
struct NeighbourSpec {
  int row = 0;
  int col = 0;
  double delta = 0.0;
};

// Ratings with the per-item mean over users removed. Entries may be
// negative, so this is not a RatingMatrix.
struct CenteredRatings {
  Eigen::MatrixXd values;       // users x items, column means zero
  Eigen::VectorXd item_means;   // length items
};

CenteredRatings center_by_item_mean(const RatingMatrix& r);
CenteredRatings center_by_item_mean(const Eigen::MatrixXd& values);

// Inverse of center_by_item_mean.
Eigen::MatrixXd restore_item_mean(const CenteredRatings& centered);

// Throws IndexError when the spec is out of bounds and DomainError when
// delta is zero, |delta| >= 1, or the changed rating would be negative.
RatingMatrix make_neighbour(const RatingMatrix& r, const NeighbourSpec& spec);

}  // namespace dpcdr

#endif  // DPCDR_RATINGS_H_

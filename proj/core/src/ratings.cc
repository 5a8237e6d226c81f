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

#include "dpcdr/ratings.h"

#include <cmath>
#include <unordered_set>
#include <utility>

#include "dpcdr/error.h"

namespace dpcdr {
namespace {

void check_unique(const std::vector<std::string>& ids, const char* what) {
  std::unordered_set<std::string> seen;
  seen.reserve(ids.size());
  for (const auto& id : ids) {
    if (!seen.insert(id).second) {
      throw DomainError(std::string("duplicate ") + what + " id '" + id + "'");
    }
  }
}

void check_values(const Eigen::MatrixXd& values) {
  for (Eigen::Index j = 0; j < values.cols(); ++j) {
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
      const double v = values(i, j);
      if (!std::isfinite(v) || v < 0.0) {
        throw DomainError("rating (" + std::to_string(i) + ", " + std::to_string(j) +
                          ") is negative or non-finite");
      }
    }
  }
}

}  // namespace

RatingMatrix::RatingMatrix(Eigen::MatrixXd values, std::vector<std::string> user_ids,
                           std::vector<std::string> item_ids)
    : values_(std::move(values)),
      user_ids_(std::move(user_ids)),
      item_ids_(std::move(item_ids)) {
  if (static_cast<Eigen::Index>(user_ids_.size()) != values_.rows() ||
      static_cast<Eigen::Index>(item_ids_.size()) != values_.cols()) {
    throw ShapeError("rating matrix is " + std::to_string(values_.rows()) + "x" +
                     std::to_string(values_.cols()) + " but has " +
                     std::to_string(user_ids_.size()) + " user ids and " +
                     std::to_string(item_ids_.size()) + " item ids");
  }
  check_unique(user_ids_, "user");
  check_unique(item_ids_, "item");
  check_values(values_);
}

RatingMatrix RatingMatrix::from_values(Eigen::MatrixXd values) {
  std::vector<std::string> users(values.rows());
  std::vector<std::string> items(values.cols());
  for (std::size_t i = 0; i < users.size(); ++i) users[i] = "u" + std::to_string(i);
  for (std::size_t j = 0; j < items.size(); ++j) items[j] = "i" + std::to_string(j);
  return RatingMatrix(std::move(values), std::move(users), std::move(items));
}

RatingMatrix RatingMatrix::with_values(Eigen::MatrixXd values) const {
  return RatingMatrix(std::move(values), user_ids_, item_ids_);
}

CenteredRatings center_by_item_mean(const Eigen::MatrixXd& values) {
  CenteredRatings out;
  out.item_means = values.colwise().mean().transpose();
  out.values = values.rowwise() - out.item_means.transpose();
  return out;
}

CenteredRatings center_by_item_mean(const RatingMatrix& r) {
  return center_by_item_mean(r.values());
}

Eigen::MatrixXd restore_item_mean(const CenteredRatings& centered) {
  return centered.values.rowwise() + centered.item_means.transpose();
}

RatingMatrix make_neighbour(const RatingMatrix& r, const NeighbourSpec& spec) {
  if (spec.row < 0 || spec.row >= r.users() || spec.col < 0 || spec.col >= r.items()) {
    throw IndexError("neighbour entry (" + std::to_string(spec.row) + ", " +
                     std::to_string(spec.col) + ") outside " + std::to_string(r.users()) +
                     "x" + std::to_string(r.items()) + " matrix");
  }
  if (!(std::abs(spec.delta) > 0.0) || !(std::abs(spec.delta) < 1.0)) {
    throw DomainError("neighbour delta must satisfy 0 < |delta| < 1");
  }
  const double changed = r(spec.row, spec.col) + spec.delta;
  if (changed < 0.0) {
    throw DomainError("neighbour rating would be negative");
  }
  Eigen::MatrixXd values = r.values();
  values(spec.row, spec.col) = changed;
  return r.with_values(std::move(values));
}

}  // namespace dpcdr

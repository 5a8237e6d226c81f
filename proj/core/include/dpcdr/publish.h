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

// Differentially private rating-matrix publishing: singular-value
// perturbation followed by a Gaussian (JLT) or sparse-aware (SJLT = P H D)
// random projection of the item dimension.
//
// Orientation: RatingMatrix is users x items. The perturbation and the
// projection act on the items x users view R1, and the result
// (1/sqrt(n1')) M R1 is transposed back to users x n1'.

#ifndef DPCDR_PUBLISH_H_
#define DPCDR_PUBLISH_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "dpcdr/ratings.h"
#include "dpcdr/rng.h"

namespace dpcdr {

enum class TransformKind { kJlt = 0, kSjlt = 1 };

// How the singular-value perturbation w is derived from (epsilon, delta, n1').
enum class NoiseCalibration {
  // w = sqrt(32 n1' ln(2/delta)) / epsilon * ln(4 n1' / delta)
  kClosedForm = 0,
  // w = 1 / (sqrt(eps0 / (2 ln(4/delta0)) + 1/4) - 1/2), the per-row bound
  // with eps0, delta0 from per_row_budget().
  kPerRowBound = 1,
};

std::string_view to_string(TransformKind kind);
TransformKind parse_transform_kind(std::string_view name);
std::string_view to_string(NoiseCalibration calibration);
NoiseCalibration parse_noise_calibration(std::string_view name);

struct PublishParams {
  double epsilon = 1.0;
  double delta = 0.01;
  double eta = 0.5;
  double mu = 0.1;
  // Probability that an entry of the sparse projection P is non-zero.
  double q = 0.5;
  std::optional<int> n1_prime_override;
  TransformKind transform_kind = TransformKind::kJlt;
  NoiseCalibration calibration = NoiseCalibration::kClosedForm;
  std::uint64_t seed = 0;

  // Throws DomainError unless epsilon > 0, 0 < delta < 1, eta > 0,
  // 0 < mu < 2, 0 < q <= 1 and any override is positive.
  void validate() const;
};

struct PerturbationPlan {
  int n1_prime = 0;
  double w = 0.0;
};

// Per-row (eps0, delta0) used by the privacy analysis:
// eps0 = epsilon / sqrt(4 n1' ln(2/delta)), delta0 = delta / (2 n1').
struct RowBudget {
  double epsilon0 = 0.0;
  double delta0 = 0.0;
};
RowBudget per_row_budget(double epsilon, double delta, int n1_prime);

// n1' = ceil(8 ln(2/mu) / eta^2) unless overridden; w per params.calibration.
PerturbationPlan derive_plan(const PublishParams& params);

double closed_form_w(double epsilon, double delta, int n1_prime);
double per_row_bound_w(double epsilon, double delta, int n1_prime);

// U sqrt(S^2 + w^2 I) V^T over the thin SVD (k = min(rows, cols) values;
// zero singular values are lifted to w as well).
Eigen::MatrixXd perturb_singular_values(const Eigen::MatrixXd& matrix, double w);

// n1' x n1 matrix of i.i.d. N(0, 1) entries.
Eigen::MatrixXd gaussian_jlt_matrix(int n1_prime, int n1, RandomStream stream);

// Diagonal of D: +-1 with equal probability.
Eigen::VectorXd draw_signs(int n, RandomStream stream);

using SparseProjection = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// P with P_ij = 0 w.p. 1 - q, else N(0, 1/q).
SparseProjection draw_sparse_projection(int n1_prime, int n, double q, RandomStream stream);

// Test hooks that replace D or H by the identity.
struct SjltHooks {
  bool identity_signs = false;
  bool identity_hadamard = false;
};

// P H D r1 for r1 with a power-of-two row count (no 1/sqrt(n1') scaling).
// D is drawn from stream.substream(kSigns), P from
// stream.substream(kSparseProjection).
Eigen::MatrixXd sjlt_apply(const Eigen::MatrixXd& r1, int n1_prime, double q,
                           RandomStream stream, SjltHooks hooks = {});

// (1/sqrt(n1')) M r1 for an items x users matrix r1. For SJLT the item
// dimension is zero-padded to the next power of two first. The dense JLT
// draws M from stream.substream(kGaussianProjection).
Eigen::MatrixXd random_transform(const Eigen::MatrixXd& r1, int n1_prime,
                                 const PublishParams& params, RandomStream stream,
                                 SjltHooks hooks = {});

struct PublishedMatrix {
  Eigen::MatrixXd values;  // users x n1'
  PerturbationPlan plan;
  PublishParams params;
  int padded_n = 0;  // item dimension after padding (SJLT); n1 for JLT
  int source_users = 0;
  int source_items = 0;
  std::vector<std::string> user_ids;
  std::vector<std::string> warnings;
};

// The full pipeline. Deterministic given params.seed.
PublishedMatrix publish(const RatingMatrix& r, const PublishParams& params);

// Center, transpose to items x users, and perturb: the matrix R1 whose Gram
// matrix R1^T R1 the published output approximates in expectation.
Eigen::MatrixXd perturbed_item_user_matrix(const Eigen::MatrixXd& ratings, double w);

}  // namespace dpcdr

#endif  // DPCDR_PUBLISH_H_

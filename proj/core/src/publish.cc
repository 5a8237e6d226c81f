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

#include <algorithm>
#include <cmath>
#include <string>

#include "dpcdr/error.h"
#include "dpcdr/fwht.h"
#include "dpcdr/svd.h"

namespace dpcdr {
namespace {

// Above this density the projection is applied as a dense product.
constexpr double kDenseApplyDensity = 0.25;

}  // namespace

std::string_view to_string(TransformKind kind) {
  return kind == TransformKind::kJlt ? "jlt" : "sjlt";
}

TransformKind parse_transform_kind(std::string_view name) {
  if (name == "jlt" || name == "JLT") return TransformKind::kJlt;
  if (name == "sjlt" || name == "SJLT") return TransformKind::kSjlt;
  throw DomainError("unknown transform '" + std::string(name) + "' (expected jlt or sjlt)");
}

std::string_view to_string(NoiseCalibration calibration) {
  return calibration == NoiseCalibration::kClosedForm ? "closed-form" : "per-row-bound";
}

NoiseCalibration parse_noise_calibration(std::string_view name) {
  if (name == "closed-form") return NoiseCalibration::kClosedForm;
  if (name == "per-row-bound") return NoiseCalibration::kPerRowBound;
  throw DomainError("unknown calibration '" + std::string(name) +
                    "' (expected closed-form or per-row-bound)");
}

void PublishParams::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw DomainError("epsilon must be > 0");
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must lie in (0, 1)");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw DomainError("eta must be > 0");
  if (!(mu > 0.0 && mu < 2.0)) throw DomainError("mu must lie in (0, 2) so that ln(2/mu) > 0");
  if (!(q > 0.0 && q <= 1.0)) throw DomainError("q must lie in (0, 1]");
  if (n1_prime_override && *n1_prime_override <= 0) {
    throw DomainError("n1' override must be positive");
  }
}

RowBudget per_row_budget(double epsilon, double delta, int n1_prime) {
  const double n = static_cast<double>(n1_prime);
  return {epsilon / std::sqrt(4.0 * n * std::log(2.0 / delta)), delta / (2.0 * n)};
}

double closed_form_w(double epsilon, double delta, int n1_prime) {
  const double n = static_cast<double>(n1_prime);
  return std::sqrt(32.0 * n * std::log(2.0 / delta)) / epsilon * std::log(4.0 * n / delta);
}

double per_row_bound_w(double epsilon, double delta, int n1_prime) {
  const RowBudget b = per_row_budget(epsilon, delta, n1_prime);
  return 1.0 / (std::sqrt(b.epsilon0 / (2.0 * std::log(4.0 / b.delta0)) + 0.25) - 0.5);
}

PerturbationPlan derive_plan(const PublishParams& params) {
  params.validate();
  PerturbationPlan plan;
  if (params.n1_prime_override) {
    plan.n1_prime = *params.n1_prime_override;
  } else {
    const double exact = 8.0 * std::log(2.0 / params.mu) / (params.eta * params.eta);
    // Absorb round-off so that an exact integer is not bumped to the next one.
    const double n = std::ceil(exact - 1e-9 * std::max(1.0, exact));
    if (!(n >= 1.0) || n > 1e9) throw DomainError("derived n1' out of range");
    plan.n1_prime = static_cast<int>(n);
  }
  plan.w = params.calibration == NoiseCalibration::kClosedForm
               ? closed_form_w(params.epsilon, params.delta, plan.n1_prime)
               : per_row_bound_w(params.epsilon, params.delta, plan.n1_prime);
  if (!(plan.w > 0.0) || !std::isfinite(plan.w)) {
    throw DomainError("perturbation magnitude w is not a positive finite number");
  }
  return plan;
}

Eigen::MatrixXd perturb_singular_values(const Eigen::MatrixXd& matrix, double w) {
  if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("w must be finite and >= 0");
  if (!matrix.allFinite()) throw DomainError("matrix to perturb has non-finite entries");
  if (matrix.size() == 0) return matrix;
  const SvdResult svd = jacobi_svd(matrix);
  const Eigen::VectorXd lifted =
      (svd.singular_values.array().square() + w * w).sqrt().matrix();
  return svd.u * lifted.asDiagonal() * svd.v.transpose();
}

Eigen::MatrixXd gaussian_jlt_matrix(int n1_prime, int n1, RandomStream stream) {
  if (n1_prime <= 0 || n1 <= 0) throw DomainError("projection dims must be positive");
  Eigen::MatrixXd m(n1_prime, n1);
  // Row-major fill order so the stream layout does not depend on storage.
  for (int i = 0; i < n1_prime; ++i) {
    for (int j = 0; j < n1; ++j) m(i, j) = stream.normal();
  }
  return m;
}

Eigen::VectorXd draw_signs(int n, RandomStream stream) {
  Eigen::VectorXd d(n);
  for (int i = 0; i < n; ++i) d(i) = stream.sign();
  return d;
}

SparseProjection draw_sparse_projection(int n1_prime, int n, double q, RandomStream stream) {
  if (!(q > 0.0 && q <= 1.0)) throw DomainError("q must lie in (0, 1]");
  if (n1_prime <= 0 || n <= 0) throw DomainError("projection dims must be positive");
  const double scale = std::sqrt(1.0 / q);
  const long long total = static_cast<long long>(n1_prime) * n;
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(static_cast<double>(total) * q * 1.1) + 16);
  if (q >= 1.0) {
    for (long long pos = 0; pos < total; ++pos) {
      entries.emplace_back(static_cast<int>(pos / n), static_cast<int>(pos % n),
                           stream.normal() * scale);
    }
  } else {
    // Geometric gaps between non-zeros: same law as i.i.d. Bernoulli(q) masks.
    const double log_miss = std::log1p(-q);
    long long pos = -1;
    while (true) {
      const double gap = std::floor(std::log(stream.uniform_open()) / log_miss);
      if (gap >= static_cast<double>(total)) break;
      pos += static_cast<long long>(gap) + 1;
      if (pos >= total) break;
      entries.emplace_back(static_cast<int>(pos / n), static_cast<int>(pos % n),
                           stream.normal() * scale);
    }
  }
  SparseProjection p(n1_prime, n);
  p.setFromTriplets(entries.begin(), entries.end());
  return p;
}

Eigen::MatrixXd sjlt_apply(const Eigen::MatrixXd& r1, int n1_prime, double q,
                           RandomStream stream, SjltHooks hooks) {
  if (!(q > 0.0 && q <= 1.0)) throw DomainError("q must lie in (0, 1]");
  const auto n = static_cast<std::size_t>(r1.rows());
  if (!is_power_of_two(n)) {
    throw DomainError("SJLT input item dimension " + std::to_string(n) +
                      " is not a power of two");
  }
  Eigen::MatrixXd y = r1;
  if (!hooks.identity_signs) {
    const Eigen::VectorXd d = draw_signs(static_cast<int>(n), stream.substream(StreamTag::kSigns));
    y = d.asDiagonal() * y;
  }
  if (!hooks.identity_hadamard) fwht_columns(y);
  const SparseProjection p = draw_sparse_projection(
      n1_prime, static_cast<int>(n), q, stream.substream(StreamTag::kSparseProjection));
  if (q > kDenseApplyDensity) {
    return Eigen::MatrixXd(p) * y;
  }
  return p * y;
}

Eigen::MatrixXd random_transform(const Eigen::MatrixXd& r1, int n1_prime,
                                 const PublishParams& params, RandomStream stream,
                                 SjltHooks hooks) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(n1_prime));
  if (params.transform_kind == TransformKind::kJlt) {
    const Eigen::MatrixXd m = gaussian_jlt_matrix(
        n1_prime, static_cast<int>(r1.rows()), stream.substream(StreamTag::kGaussianProjection));
    return scale * (m * r1);
  }
  const auto padded = static_cast<Eigen::Index>(next_power_of_two(static_cast<std::size_t>(r1.rows())));
  if (padded == r1.rows()) {
    return scale * sjlt_apply(r1, n1_prime, params.q, stream, hooks);
  }
  Eigen::MatrixXd padded_r1 = Eigen::MatrixXd::Zero(padded, r1.cols());
  padded_r1.topRows(r1.rows()) = r1;
  return scale * sjlt_apply(padded_r1, n1_prime, params.q, stream, hooks);
}

Eigen::MatrixXd perturbed_item_user_matrix(const Eigen::MatrixXd& ratings, double w) {
  const CenteredRatings centered = center_by_item_mean(ratings);
  return perturb_singular_values(centered.values.transpose(), w);
}

PublishedMatrix publish(const RatingMatrix& r, const PublishParams& params) {
  PublishedMatrix out;
  out.plan = derive_plan(params);
  out.params = params;
  out.source_users = r.users();
  out.source_items = r.items();
  out.user_ids = r.user_ids();
  out.padded_n = params.transform_kind == TransformKind::kSjlt
                     ? static_cast<int>(next_power_of_two(static_cast<std::size_t>(r.items())))
                     : r.items();
  if (out.plan.n1_prime > r.items()) {
    out.warnings.push_back("n1' = " + std::to_string(out.plan.n1_prime) +
                           " exceeds the item count " + std::to_string(r.items()) +
                           "; the projection does not reduce dimension");
  }
  const Eigen::MatrixXd r1 = perturbed_item_user_matrix(r.values(), out.plan.w);
  const Eigen::MatrixXd projected =
      random_transform(r1, out.plan.n1_prime, params, RandomStream(params.seed));
  out.values = projected.transpose();
  if (!out.values.allFinite()) throw NumericError("published matrix has non-finite entries");
  return out;
}

}  // namespace dpcdr

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

#include "dpcdr/svd.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "dpcdr/error.h"

namespace dpcdr {
namespace {

// Columns whose norm is below this fraction of the largest are treated as
// null directions and get a completed left singular vector.
constexpr double kNullColumnRatio = 1e-12;

// Orthonormalizes column j of q against the valid columns using the unit
// vector e_i with the largest remainder. The squared remainders sum to the
// number of missing directions, so the best one is at least
// sqrt(missing / n).
void complete_column(Eigen::MatrixXd& q, Eigen::Index j,
                     const std::vector<bool>& valid) {
  const Eigen::Index n = q.rows();
  Eigen::VectorXd best;
  double best_norm = 0.0;
  for (Eigen::Index e = 0; e < n; ++e) {
    Eigen::VectorXd cand = Eigen::VectorXd::Unit(n, e);
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index c = 0; c < q.cols(); ++c) {
        if (c == j || !valid[static_cast<std::size_t>(c)]) continue;
        cand -= q.col(c).dot(cand) * q.col(c);
      }
    }
    const double norm = cand.norm();
    if (norm > best_norm) {
      best_norm = norm;
      best = cand;
    }
  }
  if (!(best_norm > 1e-6)) throw NumericError("could not complete orthonormal basis");
  q.col(j) = best / best_norm;
}

// Requires a.rows() >= a.cols().
SvdResult tall_svd(const Eigen::MatrixXd& a, const JacobiOptions& options) {
  const Eigen::Index n = a.cols();
  Eigen::MatrixXd w = a;
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd sq(n);
  for (Eigen::Index j = 0; j < n; ++j) sq(j) = w.col(j).squaredNorm();

  int sweep = 0;
  bool converged = n < 2;
  while (!converged) {
    if (sweep == options.max_sweeps) {
      throw NumericError("Jacobi SVD did not converge after " +
                         std::to_string(sweep) + " sweeps");
    }
    ++sweep;
    bool rotated = false;
    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double alpha = sq(p);
        const double beta = sq(q);
        const double gamma = w.col(p).dot(w.col(q));
        if (gamma == 0.0 || std::abs(gamma) <= options.tolerance * std::sqrt(alpha * beta)) {
          continue;
        }
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::hypot(1.0, zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (Eigen::Index i = 0; i < w.rows(); ++i) {
          const double wp = w(i, p);
          const double wq = w(i, q);
          w(i, p) = c * wp - s * wq;
          w(i, q) = s * wp + c * wq;
        }
        for (Eigen::Index i = 0; i < n; ++i) {
          const double vp = v(i, p);
          const double vq = v(i, q);
          v(i, p) = c * vp - s * vq;
          v(i, q) = s * vp + c * vq;
        }
        sq(p) = w.col(p).squaredNorm();
        sq(q) = w.col(q).squaredNorm();
      }
    }
    converged = !rotated;
  }

  Eigen::VectorXd sigma(n);
  for (Eigen::Index j = 0; j < n; ++j) sigma(j) = w.col(j).norm();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index x, Eigen::Index y) { return sigma(x) > sigma(y); });

  SvdResult out;
  out.sweeps = sweep;
  out.u.resize(a.rows(), n);
  out.v.resize(n, n);
  out.singular_values.resize(n);
  const double largest = n > 0 ? sigma(order[0]) : 0.0;
  std::vector<bool> valid(static_cast<std::size_t>(n), false);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    out.singular_values(k) = sigma(src);
    out.v.col(k) = v.col(src);
    if (sigma(src) > kNullColumnRatio * largest && sigma(src) > 0.0) {
      out.u.col(k) = w.col(src) / sigma(src);
      valid[static_cast<std::size_t>(k)] = true;
    }
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    if (!valid[static_cast<std::size_t>(k)]) {
      complete_column(out.u, k, valid);
      valid[static_cast<std::size_t>(k)] = true;
    }
  }
  return out;
}

}  // namespace

SvdResult jacobi_svd(const Eigen::MatrixXd& a, const JacobiOptions& options) {
  if (!a.allFinite()) {
    throw DomainError("SVD input contains non-finite entries");
  }
  if (a.rows() >= a.cols()) {
    return tall_svd(a, options);
  }
  SvdResult t = tall_svd(a.transpose(), options);
  std::swap(t.u, t.v);
  return t;
}

double spectral_norm(const Eigen::MatrixXd& a) {
  if (a.size() == 0) return 0.0;
  return jacobi_svd(a).singular_values(0);
}

}  // namespace dpcdr

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

#ifndef DPCDR_SVD_H_
#define DPCDR_SVD_H_

#include <Eigen/Dense>

namespace dpcdr {

struct JacobiOptions {
  // A column pair is rotated while |<a_p, a_q>| > tolerance * |a_p| |a_q|.
  double tolerance = 1e-12;
  int max_sweeps = 60;
};

// Thin SVD a = u * diag(singular_values) * v^T with k = min(rows, cols).
// Singular values are non-negative and sorted in descending order; u and v
// have orthonormal columns (columns for zero singular values are completed
// to an orthonormal set).
struct SvdResult {
  Eigen::MatrixXd u;                // rows x k
  Eigen::VectorXd singular_values;  // k
  Eigen::MatrixXd v;                // cols x k
  int sweeps = 0;
};

// One-sided (Hestenes) Jacobi SVD. Orthogonalizes the columns of whichever
// orientation has fewer columns, accumulating the right rotations.
// Throws DomainError on non-finite input and NumericError when the sweep cap
// is hit before convergence.
SvdResult jacobi_svd(const Eigen::MatrixXd& a, const JacobiOptions& options = {});

// Largest singular value.
double spectral_norm(const Eigen::MatrixXd& a);

}  // namespace dpcdr

#endif  // DPCDR_SVD_H_

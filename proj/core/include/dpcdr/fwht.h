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

#ifndef DPCDR_FWHT_H_
#define DPCDR_FWHT_H_

#include <cstddef>
#include <span>

#include <Eigen/Dense>

namespace dpcdr {

constexpr bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Smallest power of two >= n (n >= 1).
std::size_t next_power_of_two(std::size_t n);

// x <- H x where H is the normalized Sylvester-Hadamard matrix,
// H_ij = d^{-1/2} (-1)^{popcount(i & j)}. O(d log d), in place.
// Throws DomainError unless x.size() is a power of two.
void fwht_in_place(std::span<double> x);

// Unnormalized butterflies only (no d^{-1/2} scaling).
void fwht_unnormalized(std::span<double> x);

// Applies the normalized transform to every column of a column-major matrix.
void fwht_columns(Eigen::MatrixXd& x);

}  // namespace dpcdr

#endif  // DPCDR_FWHT_H_

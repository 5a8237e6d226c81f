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

#include "dpcdr/fwht.h"

#include <cmath>
#include <string>

#include "dpcdr/error.h"

namespace dpcdr {

std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

void fwht_unnormalized(std::span<double> x) {
  const std::size_t d = x.size();
  if (!is_power_of_two(d)) {
    throw DomainError("Hadamard transform length " + std::to_string(d) +
                      " is not a power of two");
  }
  double* data = x.data();
  for (std::size_t half = 1; half < d; half <<= 1) {
    for (std::size_t block = 0; block < d; block += 2 * half) {
      double* lo = data + block;
      double* hi = lo + half;
      for (std::size_t k = 0; k < half; ++k) {
        const double a = lo[k];
        const double b = hi[k];
        lo[k] = a + b;
        hi[k] = a - b;
      }
    }
  }
}

void fwht_in_place(std::span<double> x) {
  fwht_unnormalized(x);
  const double scale = 1.0 / std::sqrt(static_cast<double>(x.size()));
  for (double& v : x) v *= scale;
}

void fwht_columns(Eigen::MatrixXd& x) {
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    fwht_in_place(std::span<double>(x.col(j).data(), static_cast<std::size_t>(x.rows())));
  }
}

}  // namespace dpcdr

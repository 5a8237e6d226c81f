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

// Wall-clock timing of the two projections on random items x users inputs.

#ifndef DPCDR_TOOLS_BENCH_H_
#define DPCDR_TOOLS_BENCH_H_

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "dpcdr/publish.h"

namespace dpcdr::cli {

struct BenchConfig {
  std::vector<TransformKind> transforms = {TransformKind::kJlt, TransformKind::kSjlt};
  std::vector<int> sizes = {1024, 2048, 4096, 8192};  // n1
  int n1_prime = 512;
  int users = 256;  // m
  // Non-zero probability of P; 0 means 1/m.
  double q = 0.0;
  int reps = 5;
  std::uint64_t seed = 0;

  // Throws DomainError unless reps >= 5, dims are positive and SJLT sizes
  // are powers of two.
  void validate() const;
};

struct BenchRow {
  TransformKind transform = TransformKind::kJlt;
  int n1 = 0;
  int n1_prime = 0;
  int users = 0;
  double q = 0.0;
  double median_seconds = 0.0;
  int reps = 0;
};

// JLT times the dense product M R1 with M drawn beforehand. SJLT times
// P H D R1 including the draws of D and P.
std::vector<BenchRow> run_bench(const BenchConfig& config);

// Median wall-clock seconds of a normalized FWHT over every column of an
// n x users matrix.
double time_fwht_columns(int n, int users, int reps, std::uint64_t seed);

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// CSV: transform,n1,n1_prime,users,q,median_seconds,reps.
void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows);

}  // namespace dpcdr::cli

#endif  // DPCDR_TOOLS_BENCH_H_

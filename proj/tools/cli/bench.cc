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

#include "bench.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

#include "dpcdr/error.h"
#include "dpcdr/fwht.h"
#include "dpcdr/rng.h"

namespace dpcdr::cli {
namespace {

Eigen::MatrixXd random_input(int rows, int cols, RandomStream stream) {
  Eigen::MatrixXd x(rows, cols);
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) x(i, j) = stream.normal();
  }
  return x;
}

template <typename F>
double median_seconds(int reps, F&& f) {
  std::vector<double> t;
  for (int r = 0; r < reps; ++r) {
    const auto start = std::chrono::steady_clock::now();
    f(r);
    const std::chrono::duration<double> d = std::chrono::steady_clock::now() - start;
    t.push_back(d.count());
  }
  std::nth_element(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(t.size() / 2), t.end());
  return t[t.size() / 2];
}

}  // namespace

void BenchConfig::validate() const {
  if (reps < 5) throw DomainError("bench needs at least 5 repetitions");
  if (n1_prime <= 0 || users <= 0) throw DomainError("bench dims must be positive");
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("q must lie in [0, 1]");
  if (sizes.empty()) throw DomainError("no bench sizes");
  const bool sjlt =
      std::find(transforms.begin(), transforms.end(), TransformKind::kSjlt) != transforms.end();
  for (int n : sizes) {
    if (n <= 0) throw DomainError("bench sizes must be positive");
    if (sjlt && !is_power_of_two(static_cast<std::size_t>(n))) {
      throw DomainError("SJLT bench size " + std::to_string(n) + " is not a power of two");
    }
  }
}

std::vector<BenchRow> run_bench(const BenchConfig& config) {
  config.validate();
  const RandomStream root(config.seed);
  const double q = config.q > 0.0 ? config.q : 1.0 / config.users;
  std::vector<BenchRow> rows;
  for (TransformKind kind : config.transforms) {
    for (int n : config.sizes) {
      const Eigen::MatrixXd r1 = random_input(n, config.users, root.substream(StreamTag::kInputMatrix));
      BenchRow row{kind, n, config.n1_prime, config.users, kind == TransformKind::kSjlt ? q : 1.0,
                   0.0, config.reps};
      volatile double sink = 0.0;
      if (kind == TransformKind::kJlt) {
        const Eigen::MatrixXd m = gaussian_jlt_matrix(
            config.n1_prime, n, root.substream(StreamTag::kGaussianProjection));
        row.median_seconds = median_seconds(config.reps, [&](int) {
          const Eigen::MatrixXd y = m * r1;
          sink = sink + y(0, 0);
        });
      } else {
        row.median_seconds = median_seconds(config.reps, [&](int rep) {
          const Eigen::MatrixXd y = sjlt_apply(r1, config.n1_prime, q,
                                               root.substream(StreamTag::kTrials).substream(
                                                   static_cast<std::uint64_t>(rep)));
          sink = sink + y(0, 0);
        });
      }
      rows.push_back(row);
    }
  }
  return rows;
}

double time_fwht_columns(int n, int users, int reps, std::uint64_t seed) {
  const Eigen::MatrixXd x =
      random_input(n, users, RandomStream(seed).substream(StreamTag::kInputMatrix));
  volatile double sink = 0.0;
  return median_seconds(reps, [&](int) {
    Eigen::MatrixXd y = x;
    fwht_columns(y);
    sink = sink + y(0, 0);
  });
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("slope needs >= 2 points");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const auto n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0 && y[i] > 0.0)) throw DomainError("slope needs positive values");
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) throw DomainError("slope needs distinct x values");
  return (n * sxy - sx * sy) / den;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << "transform,n1,n1_prime,users,q,median_seconds,reps\n";
  char buf[64];
  for (const BenchRow& r : rows) {
    out << to_string(r.transform) << ',' << r.n1 << ',' << r.n1_prime << ',' << r.users << ',';
    std::snprintf(buf, sizeof buf, "%.17g", r.q);
    out << buf << ',';
    std::snprintf(buf, sizeof buf, "%.9g", r.median_seconds);
    out << buf << ',' << r.reps << '\n';
  }
}

}  // namespace dpcdr::cli

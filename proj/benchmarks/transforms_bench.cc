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
#include <benchmark/benchmark.h>

#include <vector>

#include <Eigen/Dense>

#include "dpcdr/fwht.h"
#include "dpcdr/publish.h"
#include "dpcdr/rng.h"

namespace {

using dpcdr::RandomStream;
using dpcdr::StreamTag;

Eigen::MatrixXd random_input(int rows, int cols) {
  RandomStream s = RandomStream(1).substream(StreamTag::kInputMatrix);
  Eigen::MatrixXd x(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) x(i, j) = s.normal();
  }
  return x;
}

constexpr int kUsers = 256;
constexpr int kProjected = 512;

void BM_FwhtVector(benchmark::State& state) {
  const auto n = static_cast<int>(state.range(0));
  const Eigen::VectorXd x = random_input(n, 1).col(0);
  for (auto _ : state) {
    Eigen::VectorXd y = x;
    dpcdr::fwht_in_place(std::span<double>(y.data(), static_cast<std::size_t>(y.size())));
    benchmark::DoNotOptimize(y.data());
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_FwhtVector)->RangeMultiplier(2)->Range(1 << 10, 1 << 13)->Complexity(benchmark::oNLogN);

void BM_FwhtColumns(benchmark::State& state) {
  const auto n = static_cast<int>(state.range(0));
  const Eigen::MatrixXd x = random_input(n, kUsers);
  for (auto _ : state) {
    Eigen::MatrixXd y = x;
    dpcdr::fwht_columns(y);
    benchmark::DoNotOptimize(y.data());
  }
}
BENCHMARK(BM_FwhtColumns)->RangeMultiplier(2)->Range(1 << 10, 1 << 13)->Unit(benchmark::kMillisecond);

void BM_JltMatmul(benchmark::State& state) {
  const auto n = static_cast<int>(state.range(0));
  const Eigen::MatrixXd r1 = random_input(n, kUsers);
  const Eigen::MatrixXd m = dpcdr::gaussian_jlt_matrix(kProjected, n, RandomStream(2));
  for (auto _ : state) {
    Eigen::MatrixXd y = m * r1;
    benchmark::DoNotOptimize(y.data());
  }
}
BENCHMARK(BM_JltMatmul)->RangeMultiplier(2)->Range(1 << 10, 1 << 13)->Unit(benchmark::kMillisecond);

void BM_SjltApply(benchmark::State& state) {
  const auto n = static_cast<int>(state.range(0));
  const Eigen::MatrixXd r1 = random_input(n, kUsers);
  std::uint64_t rep = 0;
  for (auto _ : state) {
    Eigen::MatrixXd y = dpcdr::sjlt_apply(r1, kProjected, 1.0 / kUsers, RandomStream(3, rep++));
    benchmark::DoNotOptimize(y.data());
  }
}
BENCHMARK(BM_SjltApply)->RangeMultiplier(2)->Range(1 << 10, 1 << 13)->Unit(benchmark::kMillisecond);

void BM_Publish(benchmark::State& state) {
  const auto kind = static_cast<dpcdr::TransformKind>(state.range(0));
  const Eigen::MatrixXd values = (random_input(500, 1000).array() > 1.0).cast<double>();
  const dpcdr::RatingMatrix r = dpcdr::RatingMatrix::from_values(values);
  dpcdr::PublishParams params;
  params.epsilon = 8.0;
  params.n1_prime_override = 400;
  params.transform_kind = kind;
  for (auto _ : state) {
    dpcdr::PublishedMatrix p = dpcdr::publish(r, params);
    benchmark::DoNotOptimize(p.values.data());
  }
}
BENCHMARK(BM_Publish)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

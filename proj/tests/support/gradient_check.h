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
// Central finite-difference check of batch_loss gradients.

#ifndef DPCDR_TESTS_GRADIENT_CHECK_H_
#define DPCDR_TESTS_GRADIENT_CHECK_H_

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "dpcdr/hetero_cdr.h"
#include "dpcdr/rng.h"

namespace dpcdr::testing {

struct GradientCheckResult {
  int checked = 0;
  int failed = 0;
  double worst = 0.0;  // largest relative error
};

// A small model with published rows of width n1' = source_dim, a 0/1
// target, and a batch holding every user with about half of the target
// entries as labelled pairs.
struct GradientFixture {
  HeteroModel model;
  CdrData data;
  Batch batch;
};

inline GradientFixture make_gradient_fixture(ModelVariant variant, std::uint64_t seed,
                                             int users = 12, int source_dim = 64,
                                             int target_items = 20, int h = 16,
                                             int hidden = 24) {
  RandomStream s = RandomStream(seed).substream(StreamTag::kInputMatrix);
  GradientFixture f;
  f.data.published = Eigen::MatrixXd(users, source_dim);
  for (auto& v : f.data.published.reshaped()) v = s.normal();
  f.data.target = Eigen::MatrixXd::Zero(users, target_items);
  for (int i = 0; i < users; ++i) {
    f.data.target(i, static_cast<Eigen::Index>(s.below(static_cast<std::uint64_t>(target_items)))) = 1.0;
    for (int j = 0; j < target_items; ++j) {
      if (s.uniform() < 0.3) f.data.target(i, j) = 1.0;
    }
  }
  for (int j = 0; j < target_items; ++j) {
    if (f.data.target.col(j).sum() == 0.0) f.data.target(j % users, j) = 1.0;
  }
  ModelShape shape{users, source_dim, target_items, h, {hidden}};
  f.model = make_model(variant, shape, seed);
  for (int i = 0; i < users; ++i) f.batch.users.push_back(i);
  for (int i = 0; i < users; ++i) {
    for (int j = 0; j < target_items; ++j) {
      if (s.uniform() < 0.5) f.batch.pairs.push_back({i, j, f.data.target(i, j)});
    }
  }
  return f;
}

// Compares the analytic gradient of `weights`-weighted batch_loss with
// (L(p + step) - L(p - step)) / (2 step) on `samples` parameters drawn
// uniformly over every net, layer and weight/bias entry.
inline GradientCheckResult check_gradients(GradientFixture& f, double alpha,
                                           const LossWeights& weights, int samples,
                                           std::uint64_t seed, double step = 1e-5,
                                           double tolerance = 1e-4, double floor = 1e-7) {
  ModelGradients grads = zero_gradients(f.model);
  batch_loss(f.model, f.data, f.batch, alpha, &grads, weights);
  std::vector<FeedForwardNet*> nets = f.model.nets();
  RandomStream s = RandomStream(seed).substream(StreamTag::kTrials);
  GradientCheckResult result;
  for (int k = 0; k < samples; ++k) {
    const auto n = static_cast<std::size_t>(s.below(nets.size()));
    FeedForwardNet& net = *nets[n];
    const auto l = static_cast<std::size_t>(s.below(static_cast<std::uint64_t>(net.layers())));
    Eigen::MatrixXd& w = net.weights()[l];
    Eigen::VectorXd& b = net.biases()[l];
    const auto total = static_cast<std::uint64_t>(w.size() + b.size());
    const auto idx = static_cast<Eigen::Index>(s.below(total));
    double* p = idx < w.size() ? w.data() + idx : b.data() + (idx - w.size());
    const double analytic = idx < w.size() ? grads[n].weights[l].data()[idx]
                                           : grads[n].biases[l].data()[idx - w.size()];
    const double old = *p;
    *p = old + step;
    const double plus = batch_loss(f.model, f.data, f.batch, alpha, nullptr, weights).total;
    *p = old - step;
    const double minus = batch_loss(f.model, f.data, f.batch, alpha, nullptr, weights).total;
    *p = old;
    const double numeric = (plus - minus) / (2.0 * step);
    const double rel =
        std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
    result.worst = std::max(result.worst, rel);
    ++result.checked;
    if (rel > tolerance) ++result.failed;
  }
  return result;
}

}  // namespace dpcdr::testing

#endif  // DPCDR_TESTS_GRADIENT_CHECK_H_

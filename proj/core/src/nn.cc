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

#include "dpcdr/nn.h"

#include <cmath>
#include <string>

#include "dpcdr/error.h"

namespace dpcdr {
namespace {

Eigen::MatrixXd apply_output(OutputActivation act, const Eigen::MatrixXd& z) {
  if (act == OutputActivation::kLinear) return z;
  return (1.0 / (1.0 + (-z.array()).exp())).matrix();
}

}  // namespace

void NetGradients::set_zero() {
  for (auto& w : weights) w.setZero();
  for (auto& b : biases) b.setZero();
}

void NetGradients::scale(double c) {
  for (auto& w : weights) w *= c;
  for (auto& b : biases) b *= c;
}

FeedForwardNet::FeedForwardNet(std::vector<int> layer_dims, OutputActivation output)
    : dims_(std::move(layer_dims)), output_(output) {
  if (dims_.size() < 2) throw DomainError("a network needs at least input and output dims");
  for (int d : dims_) {
    if (d <= 0) throw DomainError("layer dims must be positive");
  }
  for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
    weights_.push_back(Eigen::MatrixXd::Zero(dims_[l + 1], dims_[l]));
    biases_.push_back(Eigen::VectorXd::Zero(dims_[l + 1]));
  }
}

FeedForwardNet FeedForwardNet::xavier(std::vector<int> layer_dims, RandomStream stream,
                                      OutputActivation output) {
  FeedForwardNet net(std::move(layer_dims), output);
  for (int l = 0; l < net.layers(); ++l) {
    Eigen::MatrixXd& w = net.weights_[static_cast<std::size_t>(l)];
    const double limit = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
    RandomStream s = stream.substream(static_cast<std::uint64_t>(l));
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = limit * (2.0 * s.uniform() - 1.0);
    }
  }
  return net;
}

std::size_t FeedForwardNet::parameter_count() const {
  std::size_t n = 0;
  for (int l = 0; l < layers(); ++l) {
    n += static_cast<std::size_t>(weights_[static_cast<std::size_t>(l)].size() +
                                  biases_[static_cast<std::size_t>(l)].size());
  }
  return n;
}

Eigen::MatrixXd FeedForwardNet::forward(const Eigen::MatrixXd& x) const {
  Cache cache;
  forward(x, cache);
  return std::move(cache.output);
}

const Eigen::MatrixXd& FeedForwardNet::forward(const Eigen::MatrixXd& x, Cache& cache) const {
  if (dims_.empty()) throw ShapeError("forward on an empty network");
  if (x.rows() != input_dim()) {
    throw ShapeError("network expects input dim " + std::to_string(input_dim()) + ", got " +
                     std::to_string(x.rows()));
  }
  const auto n = static_cast<std::size_t>(layers());
  cache.inputs.resize(n);
  cache.pre.resize(n);
  cache.inputs[0] = x;
  for (std::size_t l = 0; l < n; ++l) {
    cache.pre[l].noalias() = weights_[l] * cache.inputs[l];
    cache.pre[l].colwise() += biases_[l];
    if (l + 1 < n) cache.inputs[l + 1] = cache.pre[l].cwiseMax(0.0);
  }
  cache.output = apply_output(output_, cache.pre[n - 1]);
  return cache.output;
}

Eigen::MatrixXd FeedForwardNet::backward(const Cache& cache, const Eigen::MatrixXd& grad_output,
                                         NetGradients& grads) const {
  const auto n = static_cast<std::size_t>(layers());
  if (grad_output.rows() != output_dim() || grad_output.cols() != cache.output.cols()) {
    throw ShapeError("output gradient shape mismatch");
  }
  Eigen::MatrixXd delta;
  if (output_ == OutputActivation::kSigmoid) {
    delta = (grad_output.array() * cache.output.array() * (1.0 - cache.output.array())).matrix();
  } else {
    delta = grad_output;
  }
  for (std::size_t l = n; l-- > 0;) {
    grads.weights[l].noalias() += delta * cache.inputs[l].transpose();
    grads.biases[l] += delta.rowwise().sum();
    Eigen::MatrixXd upstream = weights_[l].transpose() * delta;
    if (l > 0) {
      upstream = (cache.pre[l - 1].array() > 0.0).select(upstream, 0.0);
    }
    delta = std::move(upstream);
  }
  return delta;
}

NetGradients FeedForwardNet::zero_gradients() const {
  NetGradients g;
  for (int l = 0; l < layers(); ++l) {
    const auto i = static_cast<std::size_t>(l);
    g.weights.push_back(Eigen::MatrixXd::Zero(weights_[i].rows(), weights_[i].cols()));
    g.biases.push_back(Eigen::VectorXd::Zero(biases_[i].size()));
  }
  return g;
}

bool FeedForwardNet::all_finite() const {
  for (int l = 0; l < layers(); ++l) {
    const auto i = static_cast<std::size_t>(l);
    if (!weights_[i].allFinite() || !biases_[i].allFinite()) return false;
  }
  return true;
}

AdamSlot make_adam_slot(const FeedForwardNet& net) {
  return {net.zero_gradients(), net.zero_gradients(), 0};
}

void adam_step(const AdamConfig& config, FeedForwardNet& net, const NetGradients& grads,
               AdamSlot& slot) {
  ++slot.step;
  const double t = static_cast<double>(slot.step);
  const double c1 = 1.0 - std::pow(config.beta1, t);
  const double c2 = 1.0 - std::pow(config.beta2, t);
  auto update = [&](auto& param, const auto& g, auto& m, auto& v) {
    m = config.beta1 * m + (1.0 - config.beta1) * g;
    v = config.beta2 * v + (1.0 - config.beta2) * g.cwiseProduct(g);
    param.array() -= config.learning_rate * (m.array() / c1) /
                     ((v.array() / c2).sqrt() + config.epsilon);
  };
  for (int l = 0; l < net.layers(); ++l) {
    const auto i = static_cast<std::size_t>(l);
    update(net.weights()[i], grads.weights[i], slot.m.weights[i], slot.v.weights[i]);
    update(net.biases()[i], grads.biases[i], slot.m.biases[i], slot.v.biases[i]);
  }
}

}  // namespace dpcdr

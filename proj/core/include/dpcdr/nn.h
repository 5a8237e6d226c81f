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

// Fully connected networks with hand-written reverse mode and Adam.
// Samples are stored as columns.

#ifndef DPCDR_NN_H_
#define DPCDR_NN_H_

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "dpcdr/rng.h"

namespace dpcdr {

enum class OutputActivation { kLinear = 0, kSigmoid = 1 };

struct NetGradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;

  void set_zero();
  void scale(double c);
};

// ReLU on every hidden layer; the output layer is linear or sigmoid.
class FeedForwardNet {
 public:
  // Activations and pre-activations of one forward pass, kept for backward.
  struct Cache {
    std::vector<Eigen::MatrixXd> inputs;  // inputs[l] feeds layer l
    std::vector<Eigen::MatrixXd> pre;     // pre[l] = W_l inputs[l] + b_l
    Eigen::MatrixXd output;
  };

  FeedForwardNet() = default;
  // Zero weights and biases. layer_dims = {in, hidden..., out}, all > 0.
  explicit FeedForwardNet(std::vector<int> layer_dims,
                          OutputActivation output = OutputActivation::kLinear);

  // Xavier-uniform weights, zero biases.
  static FeedForwardNet xavier(std::vector<int> layer_dims, RandomStream stream,
                               OutputActivation output = OutputActivation::kLinear);

  const std::vector<int>& layer_dims() const { return dims_; }
  int input_dim() const { return dims_.front(); }
  int output_dim() const { return dims_.back(); }
  int layers() const { return static_cast<int>(weights_.size()); }
  OutputActivation output_activation() const { return output_; }

  std::vector<Eigen::MatrixXd>& weights() { return weights_; }
  const std::vector<Eigen::MatrixXd>& weights() const { return weights_; }
  std::vector<Eigen::VectorXd>& biases() { return biases_; }
  const std::vector<Eigen::VectorXd>& biases() const { return biases_; }

  std::size_t parameter_count() const;

  // x: input_dim x batch. Throws ShapeError on a dimension mismatch.
  Eigen::MatrixXd forward(const Eigen::MatrixXd& x) const;
  const Eigen::MatrixXd& forward(const Eigen::MatrixXd& x, Cache& cache) const;

  // Accumulates dL/dparams into grads given dL/d(output) and returns
  // dL/d(input). The ReLU derivative at 0 is 0.
  Eigen::MatrixXd backward(const Cache& cache, const Eigen::MatrixXd& grad_output,
                           NetGradients& grads) const;

  NetGradients zero_gradients() const;
  bool all_finite() const;

 private:
  std::vector<int> dims_;
  OutputActivation output_ = OutputActivation::kLinear;
  std::vector<Eigen::MatrixXd> weights_;  // out x in
  std::vector<Eigen::VectorXd> biases_;
};

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// First and second moments for one network.
struct AdamSlot {
  NetGradients m;
  NetGradients v;
  long step = 0;
};

AdamSlot make_adam_slot(const FeedForwardNet& net);

// One bias-corrected Adam update.
void adam_step(const AdamConfig& config, FeedForwardNet& net, const NetGradients& grads,
               AdamSlot& slot);

}  // namespace dpcdr

#endif  // DPCDR_NN_H_

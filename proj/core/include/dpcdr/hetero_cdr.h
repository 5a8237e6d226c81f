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

// Heterogeneous cross-domain recommender.
//
// Source side: an autoencoder E/D over rows of the published source matrix
// (m x n1'). Target side: deep matrix factorization, with user embeddings
// from target rating rows and item embeddings from target rating columns,
// scored by cosine similarity. The two user embeddings are tied by an L2
// alignment term:
//
//   L = L_rec + L_reg + alpha * L_ali
//   L_rec = sum_i mean_k (X_ik - D(E(X_i))_k)^2
//   L_reg = -sum_(i,j) [r_ij log y_ij + (1 - r_ij) log(1 - y_ij)],
//           r_ij = R_ij / max R, y_ij = clamp(cos(U_i, V_j), 1e-8, 1 - 1e-8)
//   L_ali = sum_i ||E(X_i) - U_i||^2
//
// The symmetric variant replaces the target-side factorization with a second
// autoencoder whose sigmoid outputs are the predictions; the target-only
// variant keeps just the factorization and L_reg.

#ifndef DPCDR_HETERO_CDR_H_
#define DPCDR_HETERO_CDR_H_

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dpcdr/nn.h"
#include "dpcdr/rng.h"

namespace dpcdr {

inline constexpr double kPredictionClamp = 1e-8;

enum class ModelVariant { kHetero = 0, kSymmetric = 1, kTargetOnly = 2 };

// "hetero", "pricdr-sym", "target-only".
std::string_view to_string(ModelVariant variant);
ModelVariant parse_model_variant(std::string_view name);

struct ModelShape {
  int users = 0;         // m
  int source_dim = 0;    // n1'
  int target_items = 0;  // n2
  int h = 200;
  std::vector<int> hidden = {500};
};

struct HeteroModel {
  ModelVariant variant = ModelVariant::kHetero;
  int h = 0;
  std::uint64_t seed = 0;
  FeedForwardNet encoder;   // n1' -> h         (hetero, symmetric)
  FeedForwardNet decoder;   // h -> n1'         (hetero, symmetric)
  FeedForwardNet user_net;  // n2 -> h          (hetero, target-only)
  FeedForwardNet item_net;  // m -> h           (hetero, target-only)
  FeedForwardNet target_encoder;  // n2 -> h    (symmetric)
  FeedForwardNet target_decoder;  // h -> n2, sigmoid (symmetric)

  // The networks the variant uses, in a fixed order.
  std::vector<FeedForwardNet*> nets();
  std::vector<const FeedForwardNet*> nets() const;
  std::size_t parameter_count() const;
};

// Xavier-initialized model. Net k draws from stream.substream(kInit).substream(k).
HeteroModel make_model(ModelVariant variant, const ModelShape& shape, std::uint64_t seed);

struct TrainConfig {
  double alpha = 100.0;
  AdamConfig adam;
  int batch_size = 128;
  int epochs = 30;
  int negatives_per_positive = 4;
  std::uint64_t seed = 0;

  void validate() const;
};

struct LossBreakdown {
  double rec = 0.0;
  double reg = 0.0;
  double ali = 0.0;
  double total = 0.0;
};

// Multiplies each component before it enters the total (and its gradient).
struct LossWeights {
  double rec = 1.0;
  double reg = 1.0;
  double ali = 1.0;
};

// rec + reg + alpha * ali.
double total_loss(const LossBreakdown& parts, double alpha);

struct LabeledPair {
  int user = 0;
  int item = 0;
  double label = 0.0;  // R_ij / max R, in [0, 1]
};

struct Batch {
  std::vector<int> users;
  std::vector<LabeledPair> pairs;  // users must be listed in `users`
};

// Training inputs. Rows of both matrices are the same users.
struct CdrData {
  Eigen::MatrixXd published;  // m x n1'
  Eigen::MatrixXd target;     // m x n2, held-out entries zeroed
};

// Divides the published matrix by its root-mean-square entry so that the
// autoencoder sees unit-scale inputs whatever the noise level. A zero matrix
// is returned unchanged.
Eigen::MatrixXd normalize_published(const Eigen::MatrixXd& published);

// Throws ShapeError unless the model's input dims match the data: the
// target has as many rows as the published matrix (for source variants),
// and the nets take n1', n2 and m inputs.
void validate_shapes(const HeteroModel& model, const CdrData& data);

// One gradient slot per model net, same order as HeteroModel::nets().
using ModelGradients = std::vector<NetGradients>;
ModelGradients zero_gradients(const HeteroModel& model);

// Loss of a batch and, when grads is non-null, its exact gradient
// (accumulated into grads).
LossBreakdown batch_loss(const HeteroModel& model, const CdrData& data, const Batch& batch,
                         double alpha, ModelGradients* grads, const LossWeights& weights = {});

// Embedding E(row) and reconstruction D(E(row)).
std::pair<Eigen::VectorXd, Eigen::VectorXd> forward_reconstruct(const HeteroModel& model,
                                                                const Eigen::VectorXd& row);

// L_rec over every row of published.
double loss_rec(const HeteroModel& model, const Eigen::MatrixXd& published);

// Clamped cosine of user_net(target row i) and item_net(target column j).
// Throws DegenerateInputError when the row or column is all zero.
double predict_target(const HeteroModel& model, const Eigen::MatrixXd& target, int i, int j);

// clamp(cos(u, v)); DegenerateInputError on a zero vector.
double clamped_cosine(const Eigen::VectorXd& u, const Eigen::VectorXd& v);

// L_reg over explicit (user, item) pairs with labels R_ij / max R. Throws
// DomainError on an empty set or max R <= 0.
double loss_reg(const HeteroModel& model, const Eigen::MatrixXd& target,
                const std::vector<std::pair<int, int>>& pairs);

// sum_i ||u_a_i - u_b_i||^2 over rows. Throws ShapeError on a mismatch.
double loss_align(const Eigen::MatrixXd& u_a, const Eigen::MatrixXd& u_b);

// L_rec + L_reg + alpha * L_ali over all users and the given pairs.
LossBreakdown total_loss(const HeteroModel& model, const CdrData& data,
                         const std::vector<std::pair<int, int>>& pairs, double alpha);

// m x n2 matrix of prediction scores. Calls validate_shapes.
Eigen::MatrixXd score_matrix(const HeteroModel& model, const CdrData& data);

struct EpochLoss {
  int epoch = 0;
  double rec = 0.0;
  double reg = 0.0;
  double ali = 0.0;
  double total = 0.0;
};

// Mini-batch Adam over shuffled users. Each epoch reshuffles users with
// substream(kShuffle).substream(epoch) and draws negatives uniformly from the
// user's non-positive target items. Throws DivergenceError on a non-finite
// loss and ShapeError via validate_shapes.
std::vector<EpochLoss> train(HeteroModel& model, const CdrData& data, const TrainConfig& config);

// CSV with header epoch,l_rec,l_reg,l_ali,total.
void write_trace_csv(std::ostream& out, const std::vector<EpochLoss>& trace);

// Checkpoint: magic "DPCDRCKP", u32 format_version, u32 variant, u64 seed,
// u64 h, u32 net count, then per net u32 output activation, u32 dim count
// and u64 dims; then every weight matrix (row-major) and bias vector as
// little-endian f64 in net and layer order.
inline constexpr std::uint32_t kCheckpointFormatVersion = 1;
void write_checkpoint(std::ostream& out, const HeteroModel& model);
HeteroModel read_checkpoint(std::istream& in, const std::string& name = "<stream>");
void save_checkpoint(const std::string& path, const HeteroModel& model);
HeteroModel load_checkpoint(const std::string& path);

}  // namespace dpcdr

#endif  // DPCDR_HETERO_CDR_H_

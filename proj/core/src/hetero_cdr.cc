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

#include "dpcdr/hetero_cdr.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "dpcdr/error.h"

namespace dpcdr {
namespace {

constexpr double kHi = 1.0 - kPredictionClamp;
constexpr double kLo = kPredictionClamp;

bool uses_source(ModelVariant v) { return v != ModelVariant::kTargetOnly; }
bool uses_dmf(ModelVariant v) { return v != ModelVariant::kSymmetric; }

// Positions of each role in HeteroModel::nets(); -1 when absent.
struct NetIndex {
  int encoder = -1, decoder = -1, user = -1, item = -1, target_encoder = -1, target_decoder = -1;
};

NetIndex net_index(ModelVariant v) {
  switch (v) {
    case ModelVariant::kHetero:
      return {0, 1, 2, 3, -1, -1};
    case ModelVariant::kSymmetric:
      return {0, 1, -1, -1, 2, 3};
    case ModelVariant::kTargetOnly:
      return {-1, -1, 0, 1, -1, -1};
  }
  return {};
}

Eigen::MatrixXd gather_rows_as_columns(const Eigen::MatrixXd& m, const std::vector<int>& rows) {
  Eigen::MatrixXd out(m.cols(), static_cast<Eigen::Index>(rows.size()));
  for (std::size_t c = 0; c < rows.size(); ++c) {
    out.col(static_cast<Eigen::Index>(c)) = m.row(rows[c]).transpose();
  }
  return out;
}

// Per-pair BCE term and dL/dy (0 when the prediction is clamped).
struct PairTerm {
  double loss;
  double grad;
};

PairTerm bce(double raw, double label) {
  const double y = std::clamp(raw, kLo, kHi);
  const bool clamped = !(raw > kLo && raw < kHi);
  PairTerm t;
  t.loss = -(label * std::log(y) + (1.0 - label) * std::log(1.0 - y));
  t.grad = clamped ? 0.0 : -(label / y - (1.0 - label) / (1.0 - y));
  return t;
}

struct SourcePass {
  FeedForwardNet::Cache enc, dec;
  Eigen::MatrixXd x;      // n1' x b
  Eigen::MatrixXd u_a;    // h x b
  double rec = 0.0;
};

SourcePass source_forward(const HeteroModel& model, const Eigen::MatrixXd& published,
                          const std::vector<int>& users) {
  SourcePass s;
  s.x = gather_rows_as_columns(published, users);
  s.u_a = model.encoder.forward(s.x, s.enc);
  const Eigen::MatrixXd& recon = model.decoder.forward(s.u_a, s.dec);
  s.rec = (recon - s.x).squaredNorm() / static_cast<double>(s.x.rows());
  return s;
}

struct TargetPass {
  FeedForwardNet::Cache user, item, t_enc, t_dec;
  Eigen::MatrixXd u_b;     // h x b
  Eigen::MatrixXd d_u_b;   // dL_reg/du_b, h x b
  Eigen::MatrixXd d_v;     // dL_reg/dv, h x |items|
  Eigen::MatrixXd d_yhat;  // symmetric variant: dL_reg/d(decoder output)
  double reg = 0.0;
};

// Forward of the target side and the gradient of weight * L_reg w.r.t. its
// embeddings or outputs. `col` maps a user id to its batch column.
TargetPass target_forward(const HeteroModel& model, const Eigen::MatrixXd& target,
                          const std::vector<int>& users, const std::vector<int>& col,
                          const std::vector<LabeledPair>& pairs, double weight, bool want_grad) {
  TargetPass t;
  const Eigen::MatrixXd rows = gather_rows_as_columns(target, users);
  if (model.variant == ModelVariant::kSymmetric) {
    t.u_b = model.target_encoder.forward(rows, t.t_enc);
    const Eigen::MatrixXd& yhat = model.target_decoder.forward(t.u_b, t.t_dec);
    if (want_grad) t.d_yhat = Eigen::MatrixXd::Zero(yhat.rows(), yhat.cols());
    for (const LabeledPair& p : pairs) {
      const PairTerm term = bce(yhat(p.item, col[static_cast<std::size_t>(p.user)]), p.label);
      t.reg += term.loss;
      if (want_grad) t.d_yhat(p.item, col[static_cast<std::size_t>(p.user)]) += weight * term.grad;
    }
    return t;
  }
  t.u_b = model.user_net.forward(rows, t.user);
  // Unique items in first-seen order.
  std::vector<int> item_col(static_cast<std::size_t>(target.cols()), -1);
  std::vector<int> items;
  for (const LabeledPair& p : pairs) {
    if (item_col[static_cast<std::size_t>(p.item)] < 0) {
      item_col[static_cast<std::size_t>(p.item)] = static_cast<int>(items.size());
      items.push_back(p.item);
    }
  }
  Eigen::MatrixXd cols(target.rows(), static_cast<Eigen::Index>(items.size()));
  for (std::size_t c = 0; c < items.size(); ++c) {
    cols.col(static_cast<Eigen::Index>(c)) = target.col(items[c]);
  }
  const Eigen::MatrixXd& v = items.empty() ? cols : model.item_net.forward(cols, t.item);
  const Eigen::VectorXd u_norm = t.u_b.colwise().norm().transpose();
  const Eigen::VectorXd v_norm =
      items.empty() ? Eigen::VectorXd() : Eigen::VectorXd(v.colwise().norm().transpose());
  if (want_grad) {
    t.d_u_b = Eigen::MatrixXd::Zero(t.u_b.rows(), t.u_b.cols());
    t.d_v = Eigen::MatrixXd::Zero(t.u_b.rows(), static_cast<Eigen::Index>(items.size()));
  }
  for (const LabeledPair& p : pairs) {
    const int uc = col[static_cast<std::size_t>(p.user)];
    const int vc = item_col[static_cast<std::size_t>(p.item)];
    const double nu = u_norm(uc);
    const double nv = v_norm(vc);
    // A zero embedding has no direction; treat its cosine as 0 (clamped).
    const double c = (nu > 0.0 && nv > 0.0) ? t.u_b.col(uc).dot(v.col(vc)) / (nu * nv) : 0.0;
    const PairTerm term = bce(c, p.label);
    t.reg += term.loss;
    if (want_grad && term.grad != 0.0) {
      const double g = weight * term.grad;
      t.d_u_b.col(uc) += g * (v.col(vc) / (nu * nv) - c * t.u_b.col(uc) / (nu * nu));
      t.d_v.col(vc) += g * (t.u_b.col(uc) / (nu * nv) - c * v.col(vc) / (nv * nv));
    }
  }
  return t;
}

std::vector<int> column_map(const std::vector<int>& users, int m) {
  std::vector<int> col(static_cast<std::size_t>(m), -1);
  for (std::size_t c = 0; c < users.size(); ++c) {
    if (users[c] < 0 || users[c] >= m) throw IndexError("batch user out of range");
    col[static_cast<std::size_t>(users[c])] = static_cast<int>(c);
  }
  return col;
}

std::vector<LabeledPair> label_pairs(const Eigen::MatrixXd& target,
                                     const std::vector<std::pair<int, int>>& pairs) {
  if (pairs.empty()) throw DomainError("loss_reg needs a nonempty index set");
  const double max_r = target.size() ? target.maxCoeff() : 0.0;
  if (!(max_r > 0.0)) throw DomainError("target matrix has no positive rating");
  std::vector<LabeledPair> out;
  out.reserve(pairs.size());
  for (const auto& [i, j] : pairs) {
    if (i < 0 || i >= target.rows() || j < 0 || j >= target.cols()) {
      throw IndexError("pair (" + std::to_string(i) + ", " + std::to_string(j) +
                       ") out of range");
    }
    out.push_back({i, j, target(i, j) / max_r});
  }
  return out;
}

std::vector<int> iota_users(Eigen::Index m) {
  std::vector<int> u(static_cast<std::size_t>(m));
  std::iota(u.begin(), u.end(), 0);
  return u;
}

}  // namespace

std::string_view to_string(ModelVariant variant) {
  switch (variant) {
    case ModelVariant::kHetero:
      return "hetero";
    case ModelVariant::kSymmetric:
      return "pricdr-sym";
    case ModelVariant::kTargetOnly:
      return "target-only";
  }
  return "hetero";
}

ModelVariant parse_model_variant(std::string_view name) {
  if (name == "hetero") return ModelVariant::kHetero;
  if (name == "pricdr-sym" || name == "sym") return ModelVariant::kSymmetric;
  if (name == "target-only" || name == "target-only-dmf") return ModelVariant::kTargetOnly;
  throw DomainError("unknown variant '" + std::string(name) +
                    "' (expected hetero, pricdr-sym or target-only)");
}

std::vector<FeedForwardNet*> HeteroModel::nets() {
  switch (variant) {
    case ModelVariant::kHetero:
      return {&encoder, &decoder, &user_net, &item_net};
    case ModelVariant::kSymmetric:
      return {&encoder, &decoder, &target_encoder, &target_decoder};
    case ModelVariant::kTargetOnly:
      return {&user_net, &item_net};
  }
  return {};
}

std::vector<const FeedForwardNet*> HeteroModel::nets() const {
  std::vector<const FeedForwardNet*> out;
  for (FeedForwardNet* n : const_cast<HeteroModel*>(this)->nets()) out.push_back(n);
  return out;
}

std::size_t HeteroModel::parameter_count() const {
  std::size_t n = 0;
  for (const FeedForwardNet* net : nets()) n += net->parameter_count();
  return n;
}

HeteroModel make_model(ModelVariant variant, const ModelShape& shape, std::uint64_t seed) {
  if (shape.users <= 0 || shape.target_items <= 0 || shape.h <= 0) {
    throw DomainError("model dims must be positive");
  }
  if (uses_source(variant) && shape.source_dim <= 0) {
    throw DomainError("source dimension must be positive");
  }
  HeteroModel model;
  model.variant = variant;
  model.h = shape.h;
  model.seed = seed;
  const RandomStream init = RandomStream(seed).substream(StreamTag::kInit);
  auto dims = [&](int in, int out) {
    std::vector<int> d{in};
    d.insert(d.end(), shape.hidden.begin(), shape.hidden.end());
    d.push_back(out);
    return d;
  };
  if (uses_source(variant)) {
    model.encoder = FeedForwardNet::xavier(dims(shape.source_dim, shape.h), init.substream(0));
    model.decoder = FeedForwardNet::xavier(dims(shape.h, shape.source_dim), init.substream(1));
  }
  if (uses_dmf(variant)) {
    model.user_net = FeedForwardNet::xavier(dims(shape.target_items, shape.h), init.substream(2));
    model.item_net = FeedForwardNet::xavier(dims(shape.users, shape.h), init.substream(3));
  } else {
    model.target_encoder =
        FeedForwardNet::xavier(dims(shape.target_items, shape.h), init.substream(4));
    model.target_decoder = FeedForwardNet::xavier(dims(shape.h, shape.target_items),
                                                  init.substream(5), OutputActivation::kSigmoid);
  }
  return model;
}

void TrainConfig::validate() const {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw DomainError("alpha must be >= 0");
  if (!(adam.learning_rate >= 0.0)) throw DomainError("learning rate must be >= 0");
  if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0) || !(adam.beta2 >= 0.0 && adam.beta2 < 1.0)) {
    throw DomainError("Adam betas must lie in [0, 1)");
  }
  if (!(adam.epsilon > 0.0)) throw DomainError("Adam epsilon must be > 0");
  if (batch_size < 1) throw DomainError("batch size must be >= 1");
  if (epochs < 0) throw DomainError("epochs must be >= 0");
  if (negatives_per_positive < 0) throw DomainError("negatives per positive must be >= 0");
}

double total_loss(const LossBreakdown& parts, double alpha) {
  return parts.rec + parts.reg + alpha * parts.ali;
}

Eigen::MatrixXd normalize_published(const Eigen::MatrixXd& published) {
  if (published.size() == 0) return published;
  const double rms = std::sqrt(published.squaredNorm() / static_cast<double>(published.size()));
  if (!(rms > 0.0)) return published;
  return published / rms;
}

void validate_shapes(const HeteroModel& model, const CdrData& data) {
  const auto m = static_cast<int>(data.target.rows());
  const auto n2 = static_cast<int>(data.target.cols());
  auto expect = [](const FeedForwardNet& net, int dim, const char* what) {
    if (net.input_dim() != dim) {
      throw ShapeError(std::string(what) + " expects " + std::to_string(net.input_dim()) +
                       " inputs, data has " + std::to_string(dim));
    }
  };
  if (uses_source(model.variant)) {
    if (data.published.rows() != m) {
      throw ShapeError("published matrix has " + std::to_string(data.published.rows()) +
                       " users, target has " + std::to_string(m));
    }
    expect(model.encoder, static_cast<int>(data.published.cols()), "source encoder");
  }
  if (uses_dmf(model.variant)) {
    expect(model.user_net, n2, "user net");
    expect(model.item_net, m, "item net");
  } else {
    expect(model.target_encoder, n2, "target encoder");
  }
}

ModelGradients zero_gradients(const HeteroModel& model) {
  ModelGradients g;
  for (const FeedForwardNet* n : model.nets()) g.push_back(n->zero_gradients());
  return g;
}

LossBreakdown batch_loss(const HeteroModel& model, const CdrData& data, const Batch& batch,
                         double alpha, ModelGradients* grads, const LossWeights& weights) {
  if (batch.users.empty()) throw DomainError("empty batch");
  const int m = static_cast<int>(data.target.rows());
  const std::vector<int> col = column_map(batch.users, m);
  for (const LabeledPair& p : batch.pairs) {
    if (p.user < 0 || p.user >= m || col[static_cast<std::size_t>(p.user)] < 0) {
      throw IndexError("pair user " + std::to_string(p.user) + " is not in the batch");
    }
    if (p.item < 0 || p.item >= data.target.cols()) throw IndexError("pair item out of range");
  }
  const NetIndex idx = net_index(model.variant);
  const bool want_grad = grads != nullptr;
  LossBreakdown out;

  SourcePass src;
  Eigen::MatrixXd d_u_a;
  if (uses_source(model.variant)) {
    if (data.published.rows() != m) {
      throw ShapeError("published has " + std::to_string(data.published.rows()) +
                       " users, target has " + std::to_string(m));
    }
    src = source_forward(model, data.published, batch.users);
    out.rec = src.rec;
    if (want_grad) {
      const Eigen::MatrixXd g_recon =
          (2.0 * weights.rec / static_cast<double>(src.x.rows())) *
          (src.dec.output - src.x);
      d_u_a = model.decoder.backward(src.dec, g_recon, (*grads)[static_cast<std::size_t>(idx.decoder)]);
    }
  }

  TargetPass tgt =
      target_forward(model, data.target, batch.users, col, batch.pairs, weights.reg, want_grad);
  out.reg = tgt.reg;
  Eigen::MatrixXd d_u_b;
  if (want_grad) {
    if (model.variant == ModelVariant::kSymmetric) {
      d_u_b = model.target_decoder.backward(
          tgt.t_dec, tgt.d_yhat, (*grads)[static_cast<std::size_t>(idx.target_decoder)]);
    } else {
      d_u_b = tgt.d_u_b;
      if (tgt.d_v.cols() > 0) {
        model.item_net.backward(tgt.item, tgt.d_v, (*grads)[static_cast<std::size_t>(idx.item)]);
      }
    }
  }

  if (uses_source(model.variant)) {
    const Eigen::MatrixXd diff = src.u_a - tgt.u_b;
    out.ali = diff.squaredNorm();
    if (want_grad) {
      const double g = 2.0 * alpha * weights.ali;
      d_u_a += g * diff;
      d_u_b -= g * diff;
      model.encoder.backward(src.enc, d_u_a, (*grads)[static_cast<std::size_t>(idx.encoder)]);
    }
  }
  if (want_grad) {
    if (model.variant == ModelVariant::kSymmetric) {
      model.target_encoder.backward(tgt.t_enc, d_u_b,
                                    (*grads)[static_cast<std::size_t>(idx.target_encoder)]);
    } else {
      model.user_net.backward(tgt.user, d_u_b, (*grads)[static_cast<std::size_t>(idx.user)]);
    }
  }
  out.total = weights.rec * out.rec + weights.reg * out.reg + alpha * weights.ali * out.ali;
  return out;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> forward_reconstruct(const HeteroModel& model,
                                                                const Eigen::VectorXd& row) {
  if (!uses_source(model.variant)) throw DomainError("variant has no source autoencoder");
  if (!row.allFinite()) throw DomainError("published row has non-finite entries");
  Eigen::VectorXd emb = model.encoder.forward(row);
  Eigen::VectorXd recon = model.decoder.forward(emb);
  return {std::move(emb), std::move(recon)};
}

double loss_rec(const HeteroModel& model, const Eigen::MatrixXd& published) {
  if (!uses_source(model.variant)) throw DomainError("variant has no source autoencoder");
  return source_forward(model, published, iota_users(published.rows())).rec;
}

double clamped_cosine(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  if (u.size() != v.size()) throw ShapeError("embedding sizes differ");
  const double nu = u.norm();
  const double nv = v.norm();
  if (!(nu > 0.0) || !(nv > 0.0)) throw DegenerateInputError("zero embedding has no direction");
  return std::clamp(u.dot(v) / (nu * nv), kLo, kHi);
}

double predict_target(const HeteroModel& model, const Eigen::MatrixXd& target, int i, int j) {
  if (i < 0 || i >= target.rows() || j < 0 || j >= target.cols()) {
    throw IndexError("prediction index out of range");
  }
  if (target.row(i).isZero(0.0)) {
    throw DegenerateInputError("user " + std::to_string(i) + " has an all-zero target row");
  }
  if (model.variant == ModelVariant::kSymmetric) {
    const Eigen::VectorXd y = model.target_decoder.forward(
        model.target_encoder.forward(Eigen::VectorXd(target.row(i).transpose())));
    return std::clamp(y(j), kLo, kHi);
  }
  if (target.col(j).isZero(0.0)) {
    throw DegenerateInputError("item " + std::to_string(j) + " has an all-zero target column");
  }
  const Eigen::VectorXd u = model.user_net.forward(Eigen::VectorXd(target.row(i).transpose()));
  const Eigen::VectorXd v = model.item_net.forward(Eigen::VectorXd(target.col(j)));
  return clamped_cosine(u, v);
}

double loss_reg(const HeteroModel& model, const Eigen::MatrixXd& target,
                const std::vector<std::pair<int, int>>& pairs) {
  const std::vector<LabeledPair> labeled = label_pairs(target, pairs);
  const std::vector<int> users = iota_users(target.rows());
  const std::vector<int> col = column_map(users, static_cast<int>(target.rows()));
  return target_forward(model, target, users, col, labeled, 1.0, false).reg;
}

double loss_align(const Eigen::MatrixXd& u_a, const Eigen::MatrixXd& u_b) {
  if (u_a.rows() != u_b.rows() || u_a.cols() != u_b.cols()) {
    throw ShapeError("embedding matrices differ in shape");
  }
  return (u_a - u_b).squaredNorm();
}

LossBreakdown total_loss(const HeteroModel& model, const CdrData& data,
                         const std::vector<std::pair<int, int>>& pairs, double alpha) {
  Batch batch;
  batch.users = iota_users(data.target.rows());
  batch.pairs = label_pairs(data.target, pairs);
  return batch_loss(model, data, batch, alpha, nullptr);
}

Eigen::MatrixXd score_matrix(const HeteroModel& model, const CdrData& data) {
  validate_shapes(model, data);
  if (model.variant == ModelVariant::kSymmetric) {
    const Eigen::MatrixXd y =
        model.target_decoder.forward(model.target_encoder.forward(data.target.transpose()));
    return y.transpose().cwiseMax(kLo).cwiseMin(kHi);
  }
  Eigen::MatrixXd u = model.user_net.forward(data.target.transpose());
  Eigen::MatrixXd v = model.item_net.forward(data.target);
  for (Eigen::Index c = 0; c < u.cols(); ++c) {
    const double n = u.col(c).norm();
    if (n > 0.0) u.col(c) /= n;
  }
  for (Eigen::Index c = 0; c < v.cols(); ++c) {
    const double n = v.col(c).norm();
    if (n > 0.0) v.col(c) /= n;
  }
  return (u.transpose() * v).cwiseMax(kLo).cwiseMin(kHi);
}

std::vector<EpochLoss> train(HeteroModel& model, const CdrData& data, const TrainConfig& config) {
  config.validate();
  const auto m = static_cast<int>(data.target.rows());
  const auto n2 = static_cast<int>(data.target.cols());
  if (m == 0 || n2 == 0) throw DomainError("empty target matrix");
  validate_shapes(model, data);
  const double max_r = data.target.maxCoeff();
  if (!(max_r > 0.0)) throw DomainError("target matrix has no positive rating");

  std::vector<std::vector<int>> positives(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n2; ++j) {
      if (data.target(i, j) > 0.0) positives[static_cast<std::size_t>(i)].push_back(j);
    }
  }

  std::vector<FeedForwardNet*> nets = model.nets();
  std::vector<AdamSlot> slots;
  for (const FeedForwardNet* n : nets) slots.push_back(make_adam_slot(*n));
  ModelGradients grads = zero_gradients(model);

  const RandomStream root(config.seed);
  std::vector<int> order(static_cast<std::size_t>(m));
  std::vector<EpochLoss> trace;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    RandomStream shuffle = root.substream(StreamTag::kShuffle).substream(
        static_cast<std::uint64_t>(epoch));
    for (int i = m - 1; i > 0; --i) {
      const auto j = static_cast<int>(shuffle.below(static_cast<std::uint64_t>(i + 1)));
      std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
    }
    const RandomStream neg_epoch =
        root.substream(StreamTag::kNegatives).substream(static_cast<std::uint64_t>(epoch));
    EpochLoss acc;
    acc.epoch = epoch;
    int batch_index = 0;
    for (int start = 0; start < m; start += config.batch_size, ++batch_index) {
      const int end = std::min(m, start + config.batch_size);
      Batch batch;
      batch.users.assign(order.begin() + start, order.begin() + end);
      RandomStream neg = neg_epoch.substream(static_cast<std::uint64_t>(batch_index));
      for (int u : batch.users) {
        const auto& pos = positives[static_cast<std::size_t>(u)];
        for (int j : pos) batch.pairs.push_back({u, j, data.target(u, j) / max_r});
        if (static_cast<int>(pos.size()) >= n2) continue;
        const int draws = config.negatives_per_positive * static_cast<int>(pos.size());
        for (int k = 0; k < draws; ++k) {
          int j;
          do {
            j = static_cast<int>(neg.below(static_cast<std::uint64_t>(n2)));
          } while (data.target(u, j) > 0.0);
          batch.pairs.push_back({u, j, 0.0});
        }
      }
      for (NetGradients& g : grads) g.set_zero();
      const LossBreakdown loss = batch_loss(model, data, batch, config.alpha, &grads);
      if (!std::isfinite(loss.total)) {
        throw DivergenceError(epoch, "non-finite loss in batch " + std::to_string(batch_index));
      }
      for (std::size_t k = 0; k < nets.size(); ++k) {
        adam_step(config.adam, *nets[k], grads[k], slots[k]);
      }
      acc.rec += loss.rec;
      acc.reg += loss.reg;
      acc.ali += loss.ali;
      acc.total += loss.total;
    }
    for (const FeedForwardNet* n : nets) {
      if (!n->all_finite()) throw DivergenceError(epoch, "non-finite parameters");
    }
    trace.push_back(acc);
  }
  return trace;
}

void write_trace_csv(std::ostream& out, const std::vector<EpochLoss>& trace) {
  out << "epoch,l_rec,l_reg,l_ali,total\n";
  char buf[160];
  for (const EpochLoss& e : trace) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g\n", e.epoch, e.rec, e.reg, e.ali,
                  e.total);
    out << buf;
  }
}

}  // namespace dpcdr

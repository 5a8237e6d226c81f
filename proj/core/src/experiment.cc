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

#include "dpcdr/experiment.h"

#include "dpcdr/error.h"

namespace dpcdr {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::kPriCdrJ:
      return "pricdr-j";
    case Method::kPriCdrS:
      return "pricdr-s";
    case Method::kPriCdrSym:
      return "pricdr-sym";
    case Method::kTargetOnly:
      return "target-only";
  }
  return "pricdr-j";
}

Method parse_method(std::string_view name) {
  if (name == "pricdr-j") return Method::kPriCdrJ;
  if (name == "pricdr-s") return Method::kPriCdrS;
  if (name == "pricdr-sym") return Method::kPriCdrSym;
  if (name == "target-only") return Method::kTargetOnly;
  throw DomainError("unknown method '" + std::string(name) +
                    "' (expected pricdr-j, pricdr-s, pricdr-sym or target-only)");
}

ExperimentResult run_experiment(Method method, const ExperimentConfig& config,
                                std::uint64_t seed) {
  SynthConfig synth = config.synth;
  synth.seed = seed;
  const TwoDomain data = synth_two_domain(synth);
  const LeaveOneOut split = make_leave_one_out(data.target, seed);

  ExperimentResult result;
  CdrData cdr;
  cdr.target = split.train.values();
  ModelVariant variant = ModelVariant::kTargetOnly;
  if (method != Method::kTargetOnly) {
    const RatingMatrix source = config.source_fraction < 1.0
                                    ? subsample_positives(data.source, config.source_fraction, seed)
                                    : data.source;
    PublishParams params = config.publish;
    params.seed = seed;
    params.transform_kind =
        method == Method::kPriCdrS ? TransformKind::kSjlt : TransformKind::kJlt;
    const PublishedMatrix published = publish(source, params);
    result.n1_prime = published.plan.n1_prime;
    result.w = published.plan.w;
    cdr.published = normalize_published(published.values);
    variant = method == Method::kPriCdrSym ? ModelVariant::kSymmetric : ModelVariant::kHetero;
  }

  ModelShape shape = config.shape;
  shape.users = static_cast<int>(cdr.target.rows());
  shape.target_items = static_cast<int>(cdr.target.cols());
  shape.source_dim = static_cast<int>(cdr.published.cols());
  HeteroModel model = make_model(variant, shape, seed);
  TrainConfig train_cfg = config.train;
  train_cfg.seed = seed;
  result.trace = train(model, cdr, train_cfg);

  const Eigen::MatrixXd scores = score_matrix(model, cdr);
  result.metrics = summarize_ranks(rank_splits(scores, split.splits),
                                   std::string(to_string(method)) + "/" + std::to_string(seed));
  return result;
}

}  // namespace dpcdr

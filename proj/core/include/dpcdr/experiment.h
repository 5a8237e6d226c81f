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

// End-to-end synthetic cross-domain runs: generate, split, publish the
// source domain, train, and score the held-out test items.

#ifndef DPCDR_EXPERIMENT_H_
#define DPCDR_EXPERIMENT_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dpcdr/dataset.h"
#include "dpcdr/hetero_cdr.h"
#include "dpcdr/metrics.h"
#include "dpcdr/publish.h"

namespace dpcdr {

// J and S: heterogeneous model over a JLT or SJLT publication. Sym: the
// symmetric ablation over a JLT publication. TargetOnly: DMF on the target.
enum class Method { kPriCdrJ, kPriCdrS, kPriCdrSym, kTargetOnly };

std::string_view to_string(Method method);
Method parse_method(std::string_view name);

struct ExperimentConfig {
  SynthConfig synth;
  PublishParams publish;  // transform_kind is set by the method
  ModelShape shape;       // dims are filled in from the data
  TrainConfig train;
  // Fraction of each user's source positives kept before publishing.
  double source_fraction = 1.0;
};

struct ExperimentResult {
  MetricsRow metrics;
  std::vector<EpochLoss> trace;
  int n1_prime = 0;
  double w = 0.0;
};

// Seeds the generator, split, publication, model and training from `seed`
// (the seeds in config are ignored).
ExperimentResult run_experiment(Method method, const ExperimentConfig& config,
                                std::uint64_t seed);

}  // namespace dpcdr

#endif  // DPCDR_EXPERIMENT_H_

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

#include <cstring>
#include <fstream>

#include "binary_io.h"
#include "dpcdr/error.h"
#include "dpcdr/hetero_cdr.h"

namespace dpcdr {
namespace {

constexpr char kMagic[8] = {'D', 'P', 'C', 'D', 'R', 'C', 'K', 'P'};
constexpr std::uint64_t kMaxDim = 1u << 24;

}  // namespace

void write_checkpoint(std::ostream& out, const HeteroModel& model) {
  out.write(kMagic, sizeof kMagic);
  binary::put_u32(out, kCheckpointFormatVersion);
  binary::put_u32(out, static_cast<std::uint32_t>(model.variant));
  binary::put_u64(out, model.seed);
  binary::put_u64(out, static_cast<std::uint64_t>(model.h));
  const auto nets = model.nets();
  binary::put_u32(out, static_cast<std::uint32_t>(nets.size()));
  for (const FeedForwardNet* n : nets) {
    binary::put_u32(out, static_cast<std::uint32_t>(n->output_activation()));
    binary::put_u32(out, static_cast<std::uint32_t>(n->layer_dims().size()));
    for (int d : n->layer_dims()) binary::put_u64(out, static_cast<std::uint64_t>(d));
  }
  for (const FeedForwardNet* n : nets) {
    for (int l = 0; l < n->layers(); ++l) {
      const auto& w = n->weights()[static_cast<std::size_t>(l)];
      for (Eigen::Index i = 0; i < w.rows(); ++i) {
        for (Eigen::Index j = 0; j < w.cols(); ++j) binary::put_f64(out, w(i, j));
      }
      const auto& b = n->biases()[static_cast<std::size_t>(l)];
      for (Eigen::Index i = 0; i < b.size(); ++i) binary::put_f64(out, b(i));
    }
  }
  if (!out) throw IoError("failed writing checkpoint");
}

HeteroModel read_checkpoint(std::istream& in, const std::string& name) {
  binary::Reader r(in, name);
  char magic[8];
  r.bytes(magic, sizeof magic);
  if (std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw IoError(name + ": not a checkpoint file (bad magic)");
  }
  const std::uint32_t version = r.u32();
  if (version != kCheckpointFormatVersion) {
    throw IoError(name + ": unsupported checkpoint version " + std::to_string(version));
  }
  const std::uint32_t variant = r.u32();
  if (variant > 2) throw IoError(name + ": unknown model variant " + std::to_string(variant));
  HeteroModel model;
  model.variant = static_cast<ModelVariant>(variant);
  model.seed = r.u64();
  model.h = static_cast<int>(r.u64());
  const std::uint32_t count = r.u32();
  std::vector<FeedForwardNet*> nets = model.nets();
  if (count != nets.size()) {
    throw IoError(name + ": expected " + std::to_string(nets.size()) + " networks, found " +
                  std::to_string(count));
  }
  for (FeedForwardNet* n : nets) {
    const std::uint32_t act = r.u32();
    if (act > 1) throw IoError(name + ": unknown output activation");
    const std::uint32_t ndims = r.u32();
    if (ndims < 2 || ndims > 64) throw IoError(name + ": implausible layer count");
    std::vector<int> dims;
    for (std::uint32_t k = 0; k < ndims; ++k) {
      const std::uint64_t d = r.u64();
      if (d == 0 || d > kMaxDim) throw IoError(name + ": implausible layer dim");
      dims.push_back(static_cast<int>(d));
    }
    *n = FeedForwardNet(std::move(dims), static_cast<OutputActivation>(act));
  }
  for (FeedForwardNet* n : nets) {
    for (int l = 0; l < n->layers(); ++l) {
      auto& w = n->weights()[static_cast<std::size_t>(l)];
      for (Eigen::Index i = 0; i < w.rows(); ++i) {
        for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = r.f64();
      }
      auto& b = n->biases()[static_cast<std::size_t>(l)];
      for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = r.f64();
    }
  }
  return model;
}

void save_checkpoint(const std::string& path, const HeteroModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_checkpoint(out, model);
}

HeteroModel load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint '" + path + "'");
  return read_checkpoint(in, path);
}

}  // namespace dpcdr

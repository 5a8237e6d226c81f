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

#include "dpcdr/published_io.h"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "binary_io.h"
#include "dpcdr/error.h"

namespace dpcdr {
namespace {

constexpr char kMagic[8] = {'D', 'P', 'C', 'D', 'R', 'P', 'U', 'B'};

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string sidecar_path(const std::string& path) { return path + ".meta.json"; }

void write_published_binary(std::ostream& out, const PublishedMatrix& p) {
  out.write(kMagic, sizeof kMagic);
  binary::put_u32(out, kPublishedFormatVersion);
  binary::put_u32(out, static_cast<std::uint32_t>(p.params.transform_kind));
  binary::put_u64(out, static_cast<std::uint64_t>(p.values.rows()));
  binary::put_u64(out, static_cast<std::uint64_t>(p.source_items));
  binary::put_u64(out, static_cast<std::uint64_t>(p.plan.n1_prime));
  binary::put_u64(out, static_cast<std::uint64_t>(p.padded_n));
  binary::put_u64(out, p.params.seed);
  binary::put_f64(out, p.params.epsilon);
  binary::put_f64(out, p.params.delta);
  binary::put_f64(out, p.params.eta);
  binary::put_f64(out, p.params.mu);
  binary::put_f64(out, p.params.q);
  binary::put_f64(out, p.plan.w);
  for (Eigen::Index i = 0; i < p.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < p.values.cols(); ++j) binary::put_f64(out, p.values(i, j));
  }
  if (!out) throw IoError("failed writing published matrix");
}

PublishedMatrix read_published_binary(std::istream& in, const std::string& name) {
  binary::Reader r(in, name);
  char magic[8];
  r.bytes(magic, sizeof magic);
  if (std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw IoError(name + ": not a published-matrix file (bad magic)");
  }
  const std::uint32_t version = r.u32();
  if (version != kPublishedFormatVersion) {
    throw IoError(name + ": unsupported format version " + std::to_string(version));
  }
  PublishedMatrix p;
  const std::uint32_t kind = r.u32();
  if (kind > 1) throw IoError(name + ": unknown transform kind " + std::to_string(kind));
  p.params.transform_kind = static_cast<TransformKind>(kind);
  const std::uint64_t m = r.u64();
  p.source_items = static_cast<int>(r.u64());
  p.plan.n1_prime = static_cast<int>(r.u64());
  p.padded_n = static_cast<int>(r.u64());
  p.params.seed = r.u64();
  p.params.epsilon = r.f64();
  p.params.delta = r.f64();
  p.params.eta = r.f64();
  p.params.mu = r.f64();
  p.params.q = r.f64();
  p.plan.w = r.f64();
  if (m > (1ull << 31) || p.plan.n1_prime <= 0) {
    throw IoError(name + ": implausible dimensions in header");
  }
  p.source_users = static_cast<int>(m);
  p.params.n1_prime_override = p.plan.n1_prime;
  p.values.resize(static_cast<Eigen::Index>(m), p.plan.n1_prime);
  for (Eigen::Index i = 0; i < p.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < p.values.cols(); ++j) p.values(i, j) = r.f64();
  }
  p.user_ids.resize(static_cast<std::size_t>(m));
  for (std::size_t i = 0; i < p.user_ids.size(); ++i) p.user_ids[i] = "u" + std::to_string(i);
  return p;
}

void save_published(const std::string& path, const PublishedMatrix& p) {
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    write_published_binary(out, p);
  }
  nlohmann::json meta;
  meta["format_version"] = kPublishedFormatVersion;
  meta["user_ids"] = p.user_ids;
  meta["calibration"] = std::string(to_string(p.params.calibration));
  meta["transform"] = std::string(to_string(p.params.transform_kind));
  meta["n1_prime"] = p.plan.n1_prime;
  meta["w"] = p.plan.w;
  meta["source_users"] = p.source_users;
  meta["source_items"] = p.source_items;
  meta["warnings"] = p.warnings;
  std::ofstream out(sidecar_path(path));
  if (!out) throw IoError("cannot open '" + sidecar_path(path) + "' for writing");
  out << meta.dump(2) << '\n';
}

PublishedMatrix load_published(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open published matrix '" + path + "'");
  PublishedMatrix p = read_published_binary(in, path);
  const std::string meta_path = sidecar_path(path);
  if (std::filesystem::exists(meta_path)) {
    std::ifstream meta_in(meta_path);
    nlohmann::json meta;
    try {
      meta_in >> meta;
    } catch (const nlohmann::json::exception& e) {
      throw IoError(meta_path + ": " + e.what());
    }
    if (meta.contains("user_ids")) {
      auto ids = meta["user_ids"].get<std::vector<std::string>>();
      if (ids.size() != static_cast<std::size_t>(p.values.rows())) {
        throw IoError(meta_path + ": " + std::to_string(ids.size()) + " user ids for " +
                      std::to_string(p.values.rows()) + " rows");
      }
      p.user_ids = std::move(ids);
    }
    if (meta.contains("calibration")) {
      p.params.calibration = parse_noise_calibration(meta["calibration"].get<std::string>());
    }
    if (meta.contains("warnings")) {
      p.warnings = meta["warnings"].get<std::vector<std::string>>();
    }
  }
  return p;
}

void write_published_csv(std::ostream& out, const PublishedMatrix& p) {
  out << "# format_version=" << kPublishedFormatVersion << '\n'
      << "# m=" << p.values.rows() << '\n'
      << "# n1=" << p.source_items << '\n'
      << "# n1_prime=" << p.plan.n1_prime << '\n'
      << "# padded_n=" << p.padded_n << '\n'
      << "# epsilon=" << format_g17(p.params.epsilon) << '\n'
      << "# delta=" << format_g17(p.params.delta) << '\n'
      << "# eta=" << format_g17(p.params.eta) << '\n'
      << "# mu=" << format_g17(p.params.mu) << '\n'
      << "# q=" << format_g17(p.params.q) << '\n'
      << "# transform_kind=" << to_string(p.params.transform_kind) << '\n'
      << "# seed=" << p.params.seed << '\n'
      << "# w=" << format_g17(p.plan.w) << '\n';
  for (Eigen::Index i = 0; i < p.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < p.values.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_g17(p.values(i, j));
    }
    out << '\n';
  }
}

}  // namespace dpcdr

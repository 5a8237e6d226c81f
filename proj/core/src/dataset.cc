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

#include "dpcdr/dataset.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <string_view>
#include <unordered_map>

#include <json.hpp>

#include "dpcdr/error.h"
#include "dpcdr/rng.h"

namespace dpcdr {
namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string> sorted_unique(std::vector<std::string> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::set<std::string> user_set(const RawRatings& raw) {
  std::set<std::string> s;
  for (const auto& t : raw.triplets) s.insert(t.user);
  return s;
}

RawRatings restrict_users(const RawRatings& raw, const std::set<std::string>& users) {
  RawRatings out;
  out.warnings = raw.warnings;
  for (const auto& t : raw.triplets) {
    if (users.count(t.user)) out.triplets.push_back(t);
  }
  return out;
}

RatingMatrix build_matrix(const RawRatings& raw, const std::vector<std::string>& users) {
  std::vector<std::string> items;
  std::unordered_map<std::string, int> user_index;
  for (std::size_t i = 0; i < users.size(); ++i) user_index[users[i]] = static_cast<int>(i);
  for (const auto& t : raw.triplets) {
    if (user_index.count(t.user)) items.push_back(t.item);
  }
  items = sorted_unique(std::move(items));
  std::unordered_map<std::string, int> item_index;
  for (std::size_t j = 0; j < items.size(); ++j) item_index[items[j]] = static_cast<int>(j);
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(users.size()),
                                            static_cast<Eigen::Index>(items.size()));
  for (const auto& t : raw.triplets) {
    const auto u = user_index.find(t.user);
    if (u == user_index.end()) continue;
    v(u->second, item_index.at(t.item)) = t.rating;
  }
  return RatingMatrix(std::move(v), users, std::move(items));
}

// Fisher-Yates prefix: the first k entries of v become a uniform sample.
template <typename T>
void partial_shuffle(std::vector<T>& v, std::size_t k, RandomStream& s) {
  for (std::size_t i = 0; i < k && i + 1 < v.size(); ++i) {
    const std::size_t j = i + static_cast<std::size_t>(s.below(v.size() - i));
    std::swap(v[i], v[j]);
  }
}

}  // namespace

RawRatings read_ratings_csv(std::istream& in, const std::string& name) {
  RawRatings out;
  std::string line;
  long line_no = 0;
  bool header_seen = false;
  std::map<std::pair<std::string, std::string>, std::size_t> seen;
  long duplicates = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty()) continue;
    if (!header_seen) {
      header_seen = true;
      const auto fields = split_fields(view);
      if (fields.size() < 3) throw ParseError(name, line_no, "header needs user_id,item_id,rating");
      continue;
    }
    const auto fields = split_fields(view);
    if (fields.size() != 3 && fields.size() != 4) {
      throw ParseError(name, line_no,
                       "expected 3 or 4 fields, found " + std::to_string(fields.size()));
    }
    const std::string_view user = trim(fields[0]);
    const std::string_view item = trim(fields[1]);
    const std::string_view rating_text = trim(fields[2]);
    if (user.empty() || item.empty()) throw ParseError(name, line_no, "empty user or item id");
    double rating = 0.0;
    const auto [ptr, ec] =
        std::from_chars(rating_text.data(), rating_text.data() + rating_text.size(), rating);
    if (ec != std::errc() || ptr != rating_text.data() + rating_text.size()) {
      throw ParseError(name, line_no, "rating '" + std::string(rating_text) + "' is not a number");
    }
    if (!(rating >= 0.0 && rating <= kMaxRating)) {
      throw ParseError(name, line_no,
                       "rating " + std::string(rating_text) + " outside [0, 5]");
    }
    auto key = std::make_pair(std::string(user), std::string(item));
    const auto it = seen.find(key);
    if (it != seen.end()) {
      out.triplets[it->second].rating = rating;
      ++duplicates;
      continue;
    }
    seen.emplace(key, out.triplets.size());
    out.triplets.push_back({std::move(key.first), std::move(key.second), rating});
  }
  if (!header_seen) throw ParseError(name, line_no, "missing header line");
  if (duplicates > 0) {
    out.warnings.push_back(name + ": " + std::to_string(duplicates) +
                           " repeated (user, item) rows; kept the last rating");
  }
  return out;
}

RawRatings read_ratings_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open ratings file '" + path + "'");
  return read_ratings_csv(in, path);
}

void write_ratings_csv(std::ostream& out, const RatingMatrix& ratings) {
  out << "user_id,item_id,rating\n";
  char buf[40];
  for (int i = 0; i < ratings.users(); ++i) {
    for (int j = 0; j < ratings.items(); ++j) {
      const double r = ratings(i, j);
      if (r == 0.0) continue;
      std::snprintf(buf, sizeof buf, "%.17g", r);
      out << ratings.user_ids()[static_cast<std::size_t>(i)] << ','
          << ratings.item_ids()[static_cast<std::size_t>(j)] << ',' << buf << '\n';
    }
  }
}

RawRatings binarize(const RawRatings& raw, double threshold) {
  RawRatings out = raw;
  for (auto& t : out.triplets) t.rating = t.rating >= threshold ? 1.0 : 0.0;
  return out;
}

RawRatings filter_min_interactions(const RawRatings& raw, int k) {
  if (k < 1) throw DomainError("k must be >= 1");
  RawRatings current = raw;
  while (true) {
    std::unordered_map<std::string, int> user_count;
    std::unordered_map<std::string, int> item_count;
    for (const auto& t : current.triplets) {
      if (t.rating > 0.0) {
        ++user_count[t.user];
        ++item_count[t.item];
      }
    }
    RawRatings next;
    next.warnings = current.warnings;
    for (const auto& t : current.triplets) {
      const auto u = user_count.find(t.user);
      const auto i = item_count.find(t.item);
      if (u != user_count.end() && u->second >= k && i != item_count.end() && i->second >= k) {
        next.triplets.push_back(t);
      }
    }
    const bool stable = next.triplets.size() == current.triplets.size();
    current = std::move(next);
    if (stable) break;
  }
  if (current.triplets.empty()) {
    current.warnings.push_back("filtering with k=" + std::to_string(k) +
                               " removed every interaction");
  }
  return current;
}

std::pair<RatingMatrix, RatingMatrix> align_common_users(const RawRatings& source,
                                                         const RawRatings& target) {
  const std::set<std::string> s = user_set(source);
  const std::set<std::string> t = user_set(target);
  std::vector<std::string> common;
  std::set_intersection(s.begin(), s.end(), t.begin(), t.end(), std::back_inserter(common));
  if (common.empty()) throw DomainError("source and target share no users");
  return {build_matrix(source, common), build_matrix(target, common)};
}

RawRatings to_raw(const RatingMatrix& ratings) {
  RawRatings out;
  for (int i = 0; i < ratings.users(); ++i) {
    for (int j = 0; j < ratings.items(); ++j) {
      if (ratings(i, j) != 0.0) {
        out.triplets.push_back({ratings.user_ids()[static_cast<std::size_t>(i)],
                                ratings.item_ids()[static_cast<std::size_t>(j)], ratings(i, j)});
      }
    }
  }
  return out;
}

RatingMatrix to_matrix(const RawRatings& raw, const std::vector<std::string>& users) {
  return build_matrix(raw, users);
}

RatingMatrix to_matrix(const RawRatings& raw) {
  const std::set<std::string> users = user_set(raw);
  return build_matrix(raw, std::vector<std::string>(users.begin(), users.end()));
}

TwoDomain preprocess_two_domain(const RawRatings& source, const RawRatings& target,
                                double threshold, int k) {
  RawRatings s = binarize(source, threshold);
  RawRatings t = binarize(target, threshold);
  while (true) {
    s = filter_min_interactions(s, k);
    t = filter_min_interactions(t, k);
    const std::set<std::string> su = user_set(s);
    const std::set<std::string> tu = user_set(t);
    std::set<std::string> common;
    std::set_intersection(su.begin(), su.end(), tu.begin(), tu.end(),
                          std::inserter(common, common.end()));
    RawRatings s2 = restrict_users(s, common);
    RawRatings t2 = restrict_users(t, common);
    const bool stable =
        s2.triplets.size() == s.triplets.size() && t2.triplets.size() == t.triplets.size();
    s = std::move(s2);
    t = std::move(t2);
    if (stable) break;
  }
  auto [sm, tm] = align_common_users(s, t);
  TwoDomain out{std::move(sm), std::move(tm), {}};
  out.warnings = sorted_unique([&] {
    std::vector<std::string> w = s.warnings;
    w.insert(w.end(), t.warnings.begin(), t.warnings.end());
    return w;
  }());
  return out;
}

LeaveOneOut make_leave_one_out(const RatingMatrix& target, std::uint64_t seed, int negatives) {
  if (negatives < 0) throw DomainError("negative count must be >= 0");
  const RandomStream root = RandomStream(seed).substream(StreamTag::kSplit);
  std::vector<UserSplit> splits;
  long too_few_positives = 0;
  long too_few_negatives = 0;
  for (int i = 0; i < target.users(); ++i) {
    std::vector<int> pos;
    std::vector<int> zero;
    for (int j = 0; j < target.items(); ++j) (target(i, j) > 0.0 ? pos : zero).push_back(j);
    if (pos.size() < 3) {
      ++too_few_positives;
      continue;
    }
    if (zero.size() < static_cast<std::size_t>(negatives)) {
      ++too_few_negatives;
      continue;
    }
    RandomStream s = root.substream(static_cast<std::uint64_t>(i));
    partial_shuffle(pos, 2, s);
    partial_shuffle(zero, static_cast<std::size_t>(negatives), s);
    UserSplit split;
    split.user = i;
    split.val_item = pos[0];
    split.test_item = pos[1];
    split.negatives.assign(zero.begin(), zero.begin() + negatives);
    splits.push_back(std::move(split));
  }
  std::vector<std::string> warnings;
  if (too_few_positives > 0) {
    warnings.push_back(std::to_string(too_few_positives) +
                       " users with fewer than 3 positives excluded from evaluation");
  }
  if (too_few_negatives > 0) {
    warnings.push_back(std::to_string(too_few_negatives) + " users with fewer than " +
                       std::to_string(negatives) +
                       " non-interacted items excluded from evaluation");
  }
  RatingMatrix train = apply_holdout(target, splits);
  return {std::move(splits), std::move(train), std::move(warnings)};
}

RatingMatrix apply_holdout(const RatingMatrix& target, const std::vector<UserSplit>& splits) {
  Eigen::MatrixXd v = target.values();
  for (const UserSplit& s : splits) {
    if (s.user < 0 || s.user >= target.users() || s.val_item < 0 ||
        s.val_item >= target.items() || s.test_item < 0 || s.test_item >= target.items()) {
      throw IndexError("split refers to an index outside the target matrix");
    }
    v(s.user, s.val_item) = 0.0;
    v(s.user, s.test_item) = 0.0;
  }
  return target.with_values(std::move(v));
}

void write_split_manifest(std::ostream& out, const RatingMatrix& target,
                          const std::vector<UserSplit>& splits) {
  const auto& users = target.user_ids();
  const auto& items = target.item_ids();
  for (const UserSplit& s : splits) {
    nlohmann::ordered_json j;
    j["user"] = users.at(static_cast<std::size_t>(s.user));
    j["val_item"] = items.at(static_cast<std::size_t>(s.val_item));
    j["test_item"] = items.at(static_cast<std::size_t>(s.test_item));
    nlohmann::json neg = nlohmann::json::array();
    for (int n : s.negatives) neg.push_back(items.at(static_cast<std::size_t>(n)));
    j["negatives"] = std::move(neg);
    out << j.dump() << '\n';
  }
}

std::vector<UserSplit> read_split_manifest(std::istream& in, const RatingMatrix& target,
                                           const std::string& name) {
  std::unordered_map<std::string, int> user_index;
  std::unordered_map<std::string, int> item_index;
  for (std::size_t i = 0; i < target.user_ids().size(); ++i) {
    user_index[target.user_ids()[i]] = static_cast<int>(i);
  }
  for (std::size_t j = 0; j < target.item_ids().size(); ++j) {
    item_index[target.item_ids()[j]] = static_cast<int>(j);
  }
  std::vector<UserSplit> out;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(name, line_no, e.what());
    }
    auto lookup = [&](const std::unordered_map<std::string, int>& index, const char* key,
                      const nlohmann::json& v) {
      if (!v.is_string()) throw ParseError(name, line_no, std::string(key) + " must be a string");
      const auto it = index.find(v.get<std::string>());
      if (it == index.end()) {
        throw ParseError(name, line_no, std::string("unknown ") + key + " '" +
                                            v.get<std::string>() + "'");
      }
      return it->second;
    };
    if (!j.is_object() || !j.contains("user") || !j.contains("val_item") ||
        !j.contains("test_item") || !j.contains("negatives") || !j["negatives"].is_array()) {
      throw ParseError(name, line_no, "expected {user, val_item, test_item, negatives}");
    }
    UserSplit s;
    s.user = lookup(user_index, "user", j["user"]);
    s.val_item = lookup(item_index, "val_item", j["val_item"]);
    s.test_item = lookup(item_index, "test_item", j["test_item"]);
    for (const auto& n : j["negatives"]) s.negatives.push_back(lookup(item_index, "negative", n));
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<UserSplit> read_split_manifest(const std::string& path, const RatingMatrix& target) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open split manifest '" + path + "'");
  return read_split_manifest(in, target, path);
}

void SynthConfig::validate() const {
  if (users < 1 || items_per_domain < 1 || latent_dim < 1) {
    throw DomainError("synthetic dims must be positive");
  }
  if (!(noise >= 0.0) || !(latent_sigma >= 0.0)) {
    throw DomainError("noise and latent sigma must be >= 0");
  }
  if (!(source_density > 0.0 && source_density <= 1.0) ||
      !(target_density > 0.0 && target_density <= 1.0)) {
    throw DomainError("densities must lie in (0, 1]");
  }
}

TwoDomain synth_two_domain(const SynthConfig& config) {
  config.validate();
  const RandomStream root = RandomStream(config.seed).substream(StreamTag::kSynth);
  const int m = config.users;
  const int n = config.items_per_domain;
  const int d = config.latent_dim;
  auto lognormal = [&](int rows, RandomStream s) {
    Eigen::MatrixXd f(rows, d);
    for (int i = 0; i < rows; ++i) {
      for (int k = 0; k < d; ++k) f(i, k) = std::exp(config.latent_sigma * s.normal());
    }
    return f;
  };
  const Eigen::MatrixXd u = lognormal(m, root.substream(0));
  auto domain = [&](std::uint64_t factor_id, std::uint64_t noise_id, double density,
                    char prefix) {
    Eigen::MatrixXd v = lognormal(n, root.substream(factor_id));
    // Unit L1 item factors: items differ in topic mix, not in popularity.
    for (int j = 0; j < n; ++j) v.row(j) /= v.row(j).sum();
    RandomStream xi = root.substream(noise_id);
    Eigen::MatrixXd score = (u * v.transpose()).array().log().matrix();
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) score(i, j) += config.noise * xi.normal();
    }
    const auto total = static_cast<std::size_t>(score.size());
    const auto wanted = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::llround(density * static_cast<double>(total))), 1, total);
    std::vector<double> sorted(score.data(), score.data() + score.size());
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<long>(wanted - 1), sorted.end(),
                     std::greater<>());
    const double threshold = sorted[wanted - 1];
    Eigen::MatrixXd r = (score.array() >= threshold).cast<double>().matrix();
    std::vector<std::string> items(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) items[static_cast<std::size_t>(j)] = prefix + std::to_string(j);
    return std::make_pair(std::move(r), std::move(items));
  };
  std::vector<std::string> users(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) users[static_cast<std::size_t>(i)] = "u" + std::to_string(i);
  auto [sv, si] = domain(1, 3, config.source_density, 's');
  auto [tv, ti] = domain(2, 4, config.target_density, 't');
  return {RatingMatrix(std::move(sv), users, std::move(si)),
          RatingMatrix(std::move(tv), users, std::move(ti)),
          {}};
}

RatingMatrix subsample_positives(const RatingMatrix& ratings, double fraction,
                                 std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw DomainError("fraction must lie in (0, 1]");
  const RandomStream root = RandomStream(seed).substream(StreamTag::kShuffle);
  Eigen::MatrixXd v = ratings.values();
  for (int i = 0; i < ratings.users(); ++i) {
    std::vector<int> pos;
    for (int j = 0; j < ratings.items(); ++j) {
      if (v(i, j) > 0.0) pos.push_back(j);
    }
    const auto keep = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(pos.size())));
    RandomStream s = root.substream(static_cast<std::uint64_t>(i));
    partial_shuffle(pos, keep, s);
    for (std::size_t k = keep; k < pos.size(); ++k) v(i, pos[k]) = 0.0;
  }
  return ratings.with_values(std::move(v));
}

}  // namespace dpcdr

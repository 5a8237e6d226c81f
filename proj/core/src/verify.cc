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

#include "dpcdr/verify.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <thread>

#include <json.hpp>

#include "dpcdr/error.h"
#include "dpcdr/fwht.h"
#include "dpcdr/svd.h"

namespace dpcdr {
namespace {

constexpr int kChunk = 32;
constexpr int kPrivacyChunk = 1024;
constexpr double kUnitarityTolerance = 1e-10;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Runs fn(chunk, acc) for every chunk on up to `threads` workers and merges
// the per-chunk accumulators in chunk order.
template <typename Acc, typename Fn, typename Merge>
Acc chunked_reduce(int chunks, int threads, const Acc& zero, Fn fn, Merge merge) {
  std::vector<Acc> partial(static_cast<std::size_t>(chunks), zero);
  const int workers = std::max(1, std::min(threads, chunks));
  if (workers == 1) {
    for (int c = 0; c < chunks; ++c) fn(c, partial[static_cast<std::size_t>(c)]);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    for (int t = 0; t < workers; ++t) {
      pool.emplace_back([&] {
        for (int c = next++; c < chunks && !failed; c = next++) {
          try {
            fn(c, partial[static_cast<std::size_t>(c)]);
          } catch (...) {
            if (!failed.exchange(true)) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
  }
  Acc total = zero;
  for (const Acc& p : partial) merge(total, p);
  return total;
}

int chunk_count(int items, int chunk) { return (items + chunk - 1) / chunk; }

void flag_insufficient(CheckReport& r) {
  if (r.trials_used < kMinTrials) {
    r.pass = false;
    if (!r.notes.empty()) r.notes += "; ";
    r.notes += "insufficient trials: " + std::to_string(r.trials_used) + " < " +
               std::to_string(kMinTrials);
  }
}

RandomStream trial_base(const TrialConfig& cfg) {
  return RandomStream(cfg.seed).substream(StreamTag::kTrials);
}

RatingMatrix input_matrix(const TrialConfig& cfg) {
  return random_rating_matrix(cfg.users, cfg.items,
                              RandomStream(cfg.seed).substream(StreamTag::kInputMatrix));
}

struct BandCounts {
  long in_band = 0;
  long in_band_m_target = 0;
};

BandCounts count_rip(const TrialConfig& cfg, double gamma, double* target_out,
                     int* n1_prime_out) {
  cfg.validate();
  if (!(gamma > 0.0 && gamma <= 1.0)) throw DomainError("gamma must lie in (0, 1]");
  const RatingMatrix r = input_matrix(cfg);
  const PerturbationPlan plan = trial_plan(cfg);
  const Eigen::MatrixXd r1 = perturbed_item_user_matrix(r.values(), plan.w);
  const CenteredRatings centered = center_by_item_mean(r);
  const double k = std::min(cfg.users, cfg.items);
  const double w2 = plan.w * plan.w;
  const double target = centered.values.squaredNorm() + w2 * k;
  const double target_m = centered.values.squaredNorm() + w2 * cfg.users;
  const double lo = std::max(0.0, 1.0 - gamma);
  const double hi = 1.0 + gamma;
  const RandomStream base = trial_base(cfg);
  const BandCounts counts = chunked_reduce(
      chunk_count(cfg.trials, kChunk), cfg.threads, BandCounts{},
      [&](int c, BandCounts& acc) {
        const int end = std::min(cfg.trials, (c + 1) * kChunk);
        for (int t = c * kChunk; t < end; ++t) {
          const Eigen::MatrixXd y = random_transform(r1, plan.n1_prime, cfg.params,
                                                     base.substream(static_cast<std::uint64_t>(t)));
          const double f = y.squaredNorm();
          if (f >= lo * target && f <= hi * target) ++acc.in_band;
          if (f >= lo * target_m && f <= hi * target_m) ++acc.in_band_m_target;
        }
      },
      [](BandCounts& total, const BandCounts& p) {
        total.in_band += p.in_band;
        total.in_band_m_target += p.in_band_m_target;
      });
  *target_out = target;
  *n1_prime_out = plan.n1_prime;
  return counts;
}

}  // namespace

void TrialConfig::validate() const {
  if (trials < 1) throw DomainError("trials must be >= 1");
  if (!(confidence > 0.5 && confidence < 1.0)) throw DomainError("confidence must lie in (0.5, 1)");
  if (users < 1 || items < 1) throw DomainError("matrix dims must be positive");
  if (threads < 1) throw DomainError("threads must be >= 1");
  if (w_override && !(*w_override >= 0.0 && std::isfinite(*w_override))) {
    throw DomainError("w override must be finite and >= 0");
  }
  params.validate();
}

std::string to_json_line(const CheckReport& report) {
  nlohmann::ordered_json j;
  j["name"] = report.name;
  j["observed"] = report.observed;
  j["bound"] = report.bound;
  j["pass"] = report.pass;
  j["trials_used"] = report.trials_used;
  j["notes"] = report.notes;
  return j.dump();
}

void write_reports_jsonl(std::ostream& out, const std::vector<CheckReport>& reports) {
  for (const CheckReport& r : reports) out << to_json_line(r) << '\n';
}

RatingMatrix random_rating_matrix(int users, int items, RandomStream stream) {
  if (users < 1 || items < 1) throw DomainError("matrix dims must be positive");
  Eigen::MatrixXd v(users, items);
  for (int i = 0; i < users; ++i) {
    for (int j = 0; j < items; ++j) v(i, j) = static_cast<double>(stream.below(6));
  }
  return RatingMatrix::from_values(std::move(v));
}

PerturbationPlan trial_plan(const TrialConfig& cfg) {
  PerturbationPlan plan = derive_plan(cfg.params);
  if (cfg.w_override) plan.w = *cfg.w_override;
  return plan;
}

CheckReport check_expectation_approx(const TrialConfig& cfg) {
  cfg.validate();
  const RatingMatrix r = input_matrix(cfg);
  const PerturbationPlan plan = trial_plan(cfg);
  const Eigen::MatrixXd r1 = perturbed_item_user_matrix(r.values(), plan.w);
  const Eigen::MatrixXd gram = r1.transpose() * r1;
  const RandomStream base = trial_base(cfg);
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(cfg.users, cfg.users);
  const Eigen::MatrixXd sum = chunked_reduce(
      chunk_count(cfg.trials, kChunk), cfg.threads, zero,
      [&](int c, Eigen::MatrixXd& acc) {
        const int end = std::min(cfg.trials, (c + 1) * kChunk);
        for (int t = c * kChunk; t < end; ++t) {
          const Eigen::MatrixXd y = random_transform(r1, plan.n1_prime, cfg.params,
                                                     base.substream(static_cast<std::uint64_t>(t)));
          acc.noalias() += y.transpose() * y;
        }
      },
      [](Eigen::MatrixXd& total, const Eigen::MatrixXd& p) { total += p; });
  const Eigen::MatrixXd mean = sum / static_cast<double>(cfg.trials);
  const double denom = spectral_norm(gram);
  CheckReport report;
  report.name = "expectation_approx";
  report.observed = denom > 0.0 ? spectral_norm(mean - gram) / denom : spectral_norm(mean);
  report.bound = 0.05 * std::sqrt(5000.0 / cfg.trials);
  report.pass = report.observed <= report.bound;
  report.trials_used = cfg.trials;
  report.notes = "n1'=" + std::to_string(plan.n1_prime) + " w=" + fmt(plan.w) + " transform=" +
                 std::string(to_string(cfg.params.transform_kind));
  flag_insufficient(report);
  return report;
}

CheckReport check_covariance_gap(const TrialConfig& cfg) {
  cfg.validate();
  const RatingMatrix r = input_matrix(cfg);
  const PerturbationPlan plan = trial_plan(cfg);
  const Eigen::MatrixXd r1 = perturbed_item_user_matrix(r.values(), plan.w);
  const CenteredRatings centered = center_by_item_mean(r);
  const Eigen::MatrixXd gap =
      r1.transpose() * r1 - centered.values * centered.values.transpose();
  CheckReport report;
  report.name = "covariance_gap_bound";
  report.observed = spectral_norm(gap);
  report.bound = plan.w * plan.w * cfg.users;
  // Relative slack for the rounding of the two Gram products.
  report.pass = report.observed <= report.bound * (1.0 + 1e-9) + 1e-9;
  report.trials_used = 0;
  report.notes = "w=" + fmt(plan.w) + " m=" + std::to_string(cfg.users);
  return report;
}

CheckReport check_rip(const TrialConfig& cfg, double gamma) {
  double target = 0.0;
  int n1_prime = 0;
  const BandCounts counts = count_rip(cfg, gamma, &target, &n1_prime);
  CheckReport report;
  report.name = "rip_" + std::string(to_string(cfg.params.transform_kind));
  report.observed = static_cast<double>(counts.in_band) / cfg.trials;
  report.bound = cfg.confidence;
  report.pass = report.observed >= report.bound;
  report.trials_used = cfg.trials;
  report.notes = "gamma=" + fmt(gamma) + " n1'=" + std::to_string(n1_prime) +
                 " target=" + fmt(target) + " fraction_w2m_target=" +
                 fmt(static_cast<double>(counts.in_band_m_target) / cfg.trials);
  flag_insufficient(report);
  return report;
}

CheckReport check_rip_tail(const TrialConfig& cfg, double gamma) {
  double target = 0.0;
  int n1_prime = 0;
  const BandCounts counts = count_rip(cfg, gamma, &target, &n1_prime);
  const double p = 1.0 - static_cast<double>(counts.in_band) / cfg.trials;
  CheckReport report;
  report.name = "rip_tail_" + std::string(to_string(cfg.params.transform_kind));
  report.observed = p;
  report.bound = 2.0 * std::pow(static_cast<double>(n1_prime), -2.0 * cfg.users) +
                 3.0 * std::sqrt(p * (1.0 - p) / cfg.trials);
  report.pass = report.observed <= report.bound;
  report.trials_used = cfg.trials;
  report.notes = "gamma=" + fmt(gamma) + " n1'=" + std::to_string(n1_prime);
  flag_insufficient(report);
  return report;
}

CheckReport check_preconditioner(const TrialConfig& cfg) {
  cfg.validate();
  if (cfg.users > cfg.items) {
    throw DomainError("need users <= items for distinct one-hot vectors");
  }
  // Distinct coordinates by a partial Fisher-Yates shuffle.
  std::vector<int> idx(static_cast<std::size_t>(cfg.items));
  for (int i = 0; i < cfg.items; ++i) idx[static_cast<std::size_t>(i)] = i;
  RandomStream pick = RandomStream(cfg.seed).substream(StreamTag::kInputMatrix);
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(cfg.items, cfg.users);
  for (int c = 0; c < cfg.users; ++c) {
    const auto j = c + static_cast<int>(pick.below(static_cast<std::uint64_t>(cfg.items - c)));
    std::swap(idx[static_cast<std::size_t>(c)], idx[static_cast<std::size_t>(j)]);
    x(idx[static_cast<std::size_t>(c)], c) = 1.0;
  }
  return check_preconditioner(cfg, x);
}

CheckReport check_preconditioner(const TrialConfig& cfg, const Eigen::MatrixXd& x) {
  cfg.validate();
  const auto n = static_cast<std::size_t>(x.rows());
  if (!is_power_of_two(n)) {
    throw DomainError("preconditioner check needs a power-of-two dimension, got " +
                      std::to_string(n));
  }
  const double count = static_cast<double>(x.cols());
  const double dim = static_cast<double>(n);
  const double factor = std::sqrt(2.0 * std::log(40.0 * count * dim) / dim);
  struct Counts {
    long within = 0;
    long unitary_failures = 0;
  };
  const RandomStream base = trial_base(cfg);
  const Counts counts = chunked_reduce(
      chunk_count(cfg.trials, kChunk), cfg.threads, Counts{},
      [&](int c, Counts& acc) {
        std::vector<double> y(n);
        const int end = std::min(cfg.trials, (c + 1) * kChunk);
        for (int t = c * kChunk; t < end; ++t) {
          const Eigen::VectorXd d = draw_signs(
              static_cast<int>(n),
              base.substream(static_cast<std::uint64_t>(t)).substream(StreamTag::kSigns));
          bool ok = true;
          for (Eigen::Index col = 0; col < x.cols(); ++col) {
            double in_norm2 = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
              const double v = x(static_cast<Eigen::Index>(i), col);
              y[i] = d(static_cast<Eigen::Index>(i)) * v;
              in_norm2 += v * v;
            }
            fwht_in_place(y);
            double inf = 0.0;
            double out_norm2 = 0.0;
            for (double v : y) {
              inf = std::max(inf, std::abs(v));
              out_norm2 += v * v;
            }
            const double in_norm = std::sqrt(in_norm2);
            if (inf > factor * in_norm) ok = false;
            if (std::abs(std::sqrt(out_norm2) - in_norm) > kUnitarityTolerance) {
              ++acc.unitary_failures;
            }
          }
          if (ok) ++acc.within;
        }
      },
      [](Counts& total, const Counts& p) {
        total.within += p.within;
        total.unitary_failures += p.unitary_failures;
      });
  CheckReport report;
  report.name = "preconditioner";
  report.observed = static_cast<double>(counts.within) / cfg.trials;
  report.bound = cfg.confidence;
  report.pass = report.observed >= report.bound && counts.unitary_failures == 0;
  report.trials_used = cfg.trials;
  report.notes = "linf_bound=" + fmt(factor) + " vectors=" + std::to_string(x.cols()) +
                 " n1=" + std::to_string(n) +
                 " unitarity_failures=" + std::to_string(counts.unitary_failures);
  flag_insufficient(report);
  return report;
}

double gaussian_log_pdf(const Eigen::VectorXd& y, const Eigen::MatrixXd& c) {
  if (c.rows() != c.cols() || c.rows() != y.size()) throw ShapeError("covariance shape mismatch");
  const Eigen::LLT<Eigen::MatrixXd> llt(c);
  if (llt.info() != Eigen::Success) throw NumericError("covariance is not positive definite");
  const Eigen::MatrixXd l = llt.matrixL();
  const Eigen::VectorXd z = llt.matrixL().solve(y);
  const double log_det = 2.0 * l.diagonal().array().log().sum();
  const double k = static_cast<double>(y.size());
  return -0.5 * (z.squaredNorm() + log_det + k * std::log(2.0 * std::numbers::pi));
}

Eigen::MatrixXd row_covariance(const Eigen::MatrixXd& ratings, double w) {
  const CenteredRatings centered = center_by_item_mean(ratings);
  const Eigen::Index m = ratings.rows();
  return centered.values * centered.values.transpose() +
         w * w * Eigen::MatrixXd::Identity(m, m);
}

double privacy_loss_tail(const Eigen::MatrixXd& r, const Eigen::MatrixXd& r_prime, double w,
                         double epsilon0, int samples, RandomStream stream) {
  if (r.rows() != r_prime.rows() || r.cols() != r_prime.cols()) {
    throw ShapeError("neighbouring matrices differ in shape");
  }
  if (samples < 1) throw DomainError("samples must be >= 1");
  const Eigen::LLT<Eigen::MatrixXd> llt(row_covariance(r, w));
  const Eigen::LLT<Eigen::MatrixXd> llt_prime(row_covariance(r_prime, w));
  if (llt.info() != Eigen::Success || llt_prime.info() != Eigen::Success) {
    throw NumericError("row covariance is singular");
  }
  const Eigen::MatrixXd l = llt.matrixL();
  const Eigen::MatrixXd l_prime = llt_prime.matrixL();
  // log pdf_C(y) - log pdf_C'(y) = 0.5 (|L'^-1 y|^2 - |z|^2) + log det L' - log det L.
  const double log_det_gap =
      l_prime.diagonal().array().log().sum() - l.diagonal().array().log().sum();
  const Eigen::Index m = r.rows();
  const long exceed = chunked_reduce(
      chunk_count(samples, kPrivacyChunk), 1, 0L,
      [&](int c, long& acc) {
        RandomStream s = stream.substream(static_cast<std::uint64_t>(c));
        Eigen::VectorXd z(m);
        const int end = std::min(samples, (c + 1) * kPrivacyChunk);
        for (int t = c * kPrivacyChunk; t < end; ++t) {
          for (Eigen::Index i = 0; i < m; ++i) z(i) = s.normal();
          const Eigen::VectorXd y = l.triangularView<Eigen::Lower>() * z;
          const Eigen::VectorXd z_prime = l_prime.triangularView<Eigen::Lower>().solve(y);
          const double loss = 0.5 * (z_prime.squaredNorm() - z.squaredNorm()) + log_det_gap;
          if (std::abs(loss) > epsilon0) ++acc;
        }
      },
      [](long& total, long p) { total += p; });
  return static_cast<double>(exceed) / samples;
}

CheckReport check_privacy_loss_tail(const TrialConfig& cfg, const NeighbourSpec& spec) {
  cfg.validate();
  if (cfg.users * cfg.items > 64) {
    throw DomainError("privacy check needs users * items <= 64");
  }
  const RatingMatrix r = input_matrix(cfg);
  const RatingMatrix r_prime = make_neighbour(r, spec);
  const PerturbationPlan plan = trial_plan(cfg);
  const RowBudget budget = per_row_budget(cfg.params.epsilon, cfg.params.delta, plan.n1_prime);
  CheckReport report;
  report.name = "privacy_loss_tail";
  report.observed = privacy_loss_tail(r.values(), r_prime.values(), plan.w, budget.epsilon0,
                                      cfg.trials, trial_base(cfg));
  report.bound = budget.delta0;
  report.pass = report.observed <= report.bound;
  report.trials_used = cfg.trials;
  report.notes = "epsilon0=" + fmt(budget.epsilon0) + " w=" + fmt(plan.w) +
                 " n1'=" + std::to_string(plan.n1_prime);
  flag_insufficient(report);
  return report;
}

ComposedBudget compose_epsilon(double epsilon0, double delta0, int k, double delta_prime) {
  if (!(epsilon0 > 0.0) || !(delta0 > 0.0) || !(delta_prime > 0.0 && delta_prime < 1.0) ||
      k < 1) {
    throw DomainError("composition needs eps0 > 0, delta0 > 0, 0 < delta' < 1 and k >= 1");
  }
  const double kd = static_cast<double>(k);
  return {std::sqrt(2.0 * kd * std::log(1.0 / delta_prime)) * epsilon0 +
              kd * epsilon0 * std::expm1(epsilon0),
          kd * delta0 + delta_prime};
}

std::vector<CheckReport> run_suite(const std::string& suite, const TrialConfig& cfg,
                                   double gamma) {
  const bool all = suite == "all";
  if (!all && suite != "expectation" && suite != "rip" && suite != "preconditioner" &&
      suite != "privacy") {
    throw DomainError("unknown verify suite '" + suite +
                      "' (expected expectation, rip, preconditioner, privacy or all)");
  }
  std::vector<CheckReport> out;
  if (all || suite == "expectation") {
    out.push_back(check_expectation_approx(cfg));
    out.push_back(check_covariance_gap(cfg));
  }
  if (all || suite == "rip") {
    TrialConfig c = cfg;
    for (TransformKind kind : {TransformKind::kJlt, TransformKind::kSjlt}) {
      c.params.transform_kind = kind;
      out.push_back(check_rip(c, gamma));
      out.push_back(check_rip_tail(c, gamma));
    }
  }
  if (all || suite == "preconditioner") {
    TrialConfig c = cfg;
    c.items = static_cast<int>(next_power_of_two(static_cast<std::size_t>(cfg.items)));
    c.users = std::min(cfg.users, c.items);
    out.push_back(check_preconditioner(c));
  }
  if (all || suite == "privacy") {
    TrialConfig c = cfg;
    if (c.users * c.items > 64) {
      c.users = 6;
      c.items = 4;
    }
    out.push_back(check_privacy_loss_tail(c, NeighbourSpec{0, 0, 0.5}));
  }
  return out;
}

}  // namespace dpcdr

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

// Monte-Carlo checks of the publishing mechanism's analytic guarantees.
//
// Every check is a pure function of its TrialConfig. Trial t draws from
// RandomStream(seed).substream(kTrials).substream(t) and trials are reduced
// in fixed-size chunks in index order, so the result does not depend on the
// thread count.

#ifndef DPCDR_VERIFY_H_
#define DPCDR_VERIFY_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dpcdr/publish.h"
#include "dpcdr/ratings.h"
#include "dpcdr/rng.h"

namespace dpcdr {

// Statistical checks refuse to pass with fewer trials than this.
inline constexpr int kMinTrials = 100;

struct TrialConfig {
  int trials = 1000;
  std::uint64_t seed = 0;
  double confidence = 0.95;
  int users = 20;  // m
  int items = 16;  // n1
  PublishParams params;
  // Replaces the calibrated w, e.g. 0 to isolate the projection.
  std::optional<double> w_override;
  int threads = 1;

  // Throws DomainError unless trials >= 1, confidence in (0.5, 1), dims
  // positive, threads >= 1 and params valid.
  void validate() const;
};

struct CheckReport {
  std::string name;
  double observed = 0.0;
  double bound = 0.0;
  bool pass = false;
  int trials_used = 0;
  std::string notes;
};

// One JSON object per line with keys name, observed, bound, pass,
// trials_used, notes.
std::string to_json_line(const CheckReport& report);
void write_reports_jsonl(std::ostream& out, const std::vector<CheckReport>& reports);

// The fixed input matrix of a check: users x items with ratings drawn
// uniformly from {0, ..., 5} using stream.
RatingMatrix random_rating_matrix(int users, int items, RandomStream stream);

// w used by the checks: cfg.w_override or the calibrated value.
PerturbationPlan trial_plan(const TrialConfig& cfg);

// Relative spectral gap between mean(R~^T R~) over trials and R1^T R1.
// Pass iff observed <= 0.05 * sqrt(5000 / trials).
CheckReport check_expectation_approx(const TrialConfig& cfg);

// ||R1^T R1 - Rc^T Rc||_2 against w^2 m, where Rc is the centered input.
// Deterministic; trials_used is 0.
CheckReport check_covariance_gap(const TrialConfig& cfg);

// Fraction of trials with (1-gamma)||R1||_F^2 <= ||R~||_F^2 <=
// (1+gamma)||R1||_F^2, using ||R1||_F^2 = ||Rc||_F^2 + w^2 k with
// k = min(m, n1). Pass iff the fraction is >= cfg.confidence. The notes
// carry the fraction against the w^2 m target as well.
CheckReport check_rip(const TrialConfig& cfg, double gamma);

// Violation rate of the band above against 2 n1'^(-2m) plus three
// Monte-Carlo standard errors.
CheckReport check_rip_tail(const TrialConfig& cfg, double gamma);

// For cfg.users one-hot vectors of length cfg.items (a power of two), the
// fraction of sign draws D with max_x ||H D x||_inf <=
// sqrt(2 ln(40 m n1) / n1) ||x||_2. Pass iff the fraction is >=
// cfg.confidence and every draw keeps ||H D x||_2 = ||x||_2 within 1e-10.
CheckReport check_preconditioner(const TrialConfig& cfg);
// Same check on caller-supplied vectors (columns of x).
CheckReport check_preconditioner(const TrialConfig& cfg, const Eigen::MatrixXd& x);

// log N(y; 0, c) via a Cholesky factorization. Throws NumericError when c is
// not positive definite.
double gaussian_log_pdf(const Eigen::VectorXd& y, const Eigen::MatrixXd& c);

// Covariance of one published row for ratings r (users x items) at noise w:
// Rc^T Rc + w^2 I, the Gram matrix of the centered input with every one of
// its m singular values lifted. Equals R1^T R1 when m <= n1.
Eigen::MatrixXd row_covariance(const Eigen::MatrixXd& ratings, double w);

// Empirical Pr[|log(pdf_C(y) / pdf_C'(y))| > epsilon0] over samples
// y ~ N(0, C), C = row_covariance(r), C' = row_covariance(r_prime). The
// standard normals are drawn from stream, so two calls with the same stream
// use common random numbers.
double privacy_loss_tail(const Eigen::MatrixXd& r, const Eigen::MatrixXd& r_prime, double w,
                         double epsilon0, int samples, RandomStream stream);

// Tail frequency of the privacy loss between the random input and its
// neighbour under spec, against delta0. Requires users * items <= 64.
CheckReport check_privacy_loss_tail(const TrialConfig& cfg, const NeighbourSpec& spec);

struct ComposedBudget {
  double epsilon = 0.0;
  double delta = 0.0;
};

// Advanced composition of k mechanisms that are each (eps0, delta0)-DP:
// eps' = sqrt(2k ln(1/delta')) eps0 + k eps0 (e^eps0 - 1),
// delta' total = k delta0 + delta'.
ComposedBudget compose_epsilon(double epsilon0, double delta0, int k, double delta_prime);

// Runs a named suite: expectation, rip, preconditioner, privacy or all.
// Throws DomainError on an unknown name.
std::vector<CheckReport> run_suite(const std::string& suite, const TrialConfig& cfg,
                                   double gamma = 0.1);

}  // namespace dpcdr

#endif  // DPCDR_VERIFY_H_

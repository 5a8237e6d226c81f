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
#include "commands.h"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "CLI11.hpp"
#include "bench.h"
#include "dpcdr/dataset.h"
#include "dpcdr/error.h"
#include "dpcdr/hetero_cdr.h"
#include "dpcdr/metrics.h"
#include "dpcdr/publish.h"
#include "dpcdr/published_io.h"
#include "dpcdr/verify.h"
#include "json_config.h"

namespace dpcdr::cli {
namespace {

namespace fs = std::filesystem;

// Bad arguments that only show up after parsing, e.g. mismatched inputs.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  int threads = 1;
};

struct PublishOptions {
  std::string input;
  std::string transform = "jlt";
  std::string calibration = "closed-form";
  double epsilon = 1.0;
  double delta = 0.01;
  double eta = 0.5;
  double mu = 0.1;
  double q = 0.5;
  int n1_prime = 0;  // 0: derived from eta and mu
  bool csv = false;
};

struct VerifyOptions {
  std::string suite;
  int trials = 1000;
  double confidence = 0.95;
  int users = 20;
  int items = 16;
  double gamma = 0.1;
  double w = -1.0;  // < 0: calibrated
};

struct TrainOptions {
  std::string published;
  std::string target;
  std::string split;
  std::string variant = "hetero";
  double alpha = 100.0;
  int batch = 128;
  int epochs = 30;
  double lr = 1e-3;
  int negatives = 4;
  int h = 200;
  std::vector<int> hidden = {500};
};

struct EvalOptions {
  std::string checkpoint;
  std::string published;
  std::string target;
  std::string split;
  std::string scores;
};

struct SynthOptions {
  SynthConfig config;
  int min_interactions = 1;
};

struct SplitOptions {
  std::string target;
  int negatives = kEvalNegatives;
};

struct BenchOptions {
  std::string transform = "both";
  std::vector<int> sizes = {1024, 2048, 4096, 8192};
  int n1_prime = 512;
  int users = 256;
  double q = 0.0;
  int reps = 5;
};

void add_publish_params(CLI::App* cmd, PublishOptions& p) {
  cmd->add_option("--transform", p.transform, "jlt or sjlt");
  cmd->add_option("--calibration", p.calibration, "closed-form or per-row-bound");
  cmd->add_option("--epsilon", p.epsilon, "privacy budget epsilon");
  cmd->add_option("--delta", p.delta, "privacy budget delta");
  cmd->add_option("--eta", p.eta, "RIP distortion eta");
  cmd->add_option("--mu", p.mu, "RIP failure probability mu");
  cmd->add_option("--q,--sp", p.q, "non-zero probability of the sparse projection");
  cmd->add_option("--n1-prime", p.n1_prime, "projected dimension (0 derives it from eta, mu)");
}

PublishParams to_params(const PublishOptions& p, std::uint64_t seed) {
  PublishParams params;
  params.epsilon = p.epsilon;
  params.delta = p.delta;
  params.eta = p.eta;
  params.mu = p.mu;
  params.q = p.q;
  if (p.n1_prime != 0) params.n1_prime_override = p.n1_prime;
  params.transform_kind = parse_transform_kind(p.transform);
  params.calibration = parse_noise_calibration(p.calibration);
  params.seed = seed;
  params.validate();
  return params;
}

fs::path output_path(const Globals& g, const std::string& name) {
  return fs::path(g.out_dir) / name;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

void close_output(std::ofstream& out, const fs::path& path) {
  out.close();
  if (!out) throw IoError("error writing '" + path.string() + "'");
}

void print_warnings(std::ostream& err, const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) err << "warning: " << w << '\n';
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw UsageError(std::string(flag) + " is required");
}

int cmd_publish(const Globals& g, const PublishOptions& p, std::ostream& out,
                std::ostream& err) {
  require(p.input, "--input");
  const PublishParams params = to_params(p, g.seed);
  const RawRatings raw = read_ratings_csv(p.input);
  print_warnings(err, raw.warnings);
  if (raw.triplets.empty()) throw UsageError("ratings file '" + p.input + "' has no rows");
  const PublishedMatrix published = publish(to_matrix(raw), params);
  print_warnings(err, published.warnings);
  const fs::path path = output_path(g, "published.bin");
  save_published(path.string(), published);
  if (p.csv) {
    const fs::path csv = output_path(g, "published.csv");
    std::ofstream f = open_output(csv);
    write_published_csv(f, published);
    close_output(f, csv);
  }
  out << "published " << published.values.rows() << " x " << published.values.cols()
      << " matrix (" << to_string(params.transform_kind) << ", w = " << published.plan.w
      << ") to " << path.string() << '\n';
  return kExitOk;
}

int cmd_verify(const Globals& g, const PublishOptions& p, const VerifyOptions& v,
               std::ostream& out) {
  TrialConfig cfg;
  cfg.trials = v.trials;
  cfg.seed = g.seed;
  cfg.confidence = v.confidence;
  cfg.users = v.users;
  cfg.items = v.items;
  cfg.params = to_params(p, g.seed);
  if (v.w >= 0.0) cfg.w_override = v.w;
  cfg.threads = g.threads;
  cfg.validate();
  const std::vector<CheckReport> reports = run_suite(v.suite, cfg, v.gamma);
  const fs::path path = output_path(g, "verify.jsonl");
  std::ofstream f = open_output(path);
  write_reports_jsonl(f, reports);
  close_output(f, path);
  bool all = true;
  for (const CheckReport& r : reports) {
    out << (r.pass ? "PASS " : "FAIL ") << r.name << " observed=" << r.observed
        << " bound=" << r.bound << '\n';
    all = all && r.pass;
  }
  return all ? kExitOk : kExitCheckFailed;
}

// Target ratings with rows ordered like the published users.
RatingMatrix aligned_target(const RawRatings& raw, const PublishedMatrix& published) {
  std::set<std::string> users;
  for (const auto& t : raw.triplets) users.insert(t.user);
  const auto m = static_cast<std::size_t>(published.values.rows());
  if (users.size() != m) {
    throw UsageError("published matrix has " + std::to_string(m) + " users but target has " +
                     std::to_string(users.size()) + " users");
  }
  for (const auto& id : published.user_ids) {
    if (!users.count(id)) {
      throw UsageError("published user '" + id + "' does not appear in the target ratings");
    }
  }
  return to_matrix(raw, published.user_ids);
}

struct TrainingData {
  CdrData cdr;
  RatingMatrix target;  // full target, before holdout
  std::vector<UserSplit> splits;
};

TrainingData load_training_data(const std::string& published_path,
                                const std::string& target_path, const std::string& split_path,
                                bool needs_source, std::ostream& err) {
  require(target_path, "--target");
  const RawRatings raw = read_ratings_csv(target_path);
  print_warnings(err, raw.warnings);
  if (raw.triplets.empty()) throw UsageError("target file '" + target_path + "' has no rows");
  std::optional<RatingMatrix> target;
  Eigen::MatrixXd published;
  if (needs_source) {
    require(published_path, "--published");
    const PublishedMatrix pub = load_published(published_path);
    target = aligned_target(raw, pub);
    published = normalize_published(pub.values);
  } else {
    target = to_matrix(raw);
  }
  TrainingData data{{}, *target, {}};
  data.cdr.published = std::move(published);
  if (!split_path.empty()) {
    data.splits = read_split_manifest(split_path, *target);
    data.cdr.target = apply_holdout(*target, data.splits).values();
  } else {
    data.cdr.target = target->values();
  }
  return data;
}

void write_metrics(const Globals& g, const MetricsRow& row, std::ostream& out) {
  const fs::path path = output_path(g, "metrics.csv");
  std::ofstream f = open_output(path);
  write_metrics_csv(f, {row});
  close_output(f, path);
  out << row.run << ": hr@10=" << row.values[3] << " ndcg@10=" << row.values[4]
      << " mrr@10=" << row.values[5] << " over " << row.users << " users\n";
}

std::string run_name(const HeteroModel& model) {
  return std::string(to_string(model.variant)) + "/" + std::to_string(model.seed);
}

int cmd_train(const Globals& g, const TrainOptions& t, std::ostream& out, std::ostream& err) {
  const ModelVariant variant = parse_model_variant(t.variant);
  TrainConfig cfg;
  cfg.alpha = t.alpha;
  cfg.batch_size = t.batch;
  cfg.epochs = t.epochs;
  cfg.adam.learning_rate = t.lr;
  cfg.negatives_per_positive = t.negatives;
  cfg.seed = g.seed;
  cfg.validate();
  const bool needs_source = variant != ModelVariant::kTargetOnly;
  const TrainingData data = load_training_data(t.published, t.target, t.split, needs_source, err);

  ModelShape shape;
  shape.users = static_cast<int>(data.cdr.target.rows());
  shape.target_items = static_cast<int>(data.cdr.target.cols());
  shape.source_dim = static_cast<int>(data.cdr.published.cols());
  shape.h = t.h;
  shape.hidden = t.hidden;
  HeteroModel model = make_model(variant, shape, g.seed);
  const std::vector<EpochLoss> trace = train(model, data.cdr, cfg);

  save_checkpoint(output_path(g, "model.ckpt").string(), model);
  const fs::path trace_path = output_path(g, "trace.csv");
  std::ofstream f = open_output(trace_path);
  write_trace_csv(f, trace);
  close_output(f, trace_path);
  out << "trained " << to_string(variant) << " for " << cfg.epochs << " epochs, final loss "
      << (trace.empty() ? 0.0 : trace.back().total) << '\n';
  if (!data.splits.empty()) {
    const Eigen::MatrixXd scores = score_matrix(model, data.cdr);
    write_metrics(g, summarize_ranks(rank_splits(scores, data.splits), run_name(model)), out);
  }
  return kExitOk;
}

// "user_id,item_id,score" with a header; ids refer to target.
Eigen::MatrixXd read_scores_csv(const std::string& path, const RatingMatrix& target) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scores file '" + path + "'");
  std::unordered_map<std::string, int> users, items;
  for (int i = 0; i < target.users(); ++i) users[target.user_ids()[static_cast<std::size_t>(i)]] = i;
  for (int j = 0; j < target.items(); ++j) items[target.item_ids()[static_cast<std::size_t>(j)]] = j;
  Eigen::MatrixXd scores = Eigen::MatrixXd::Constant(
      target.users(), target.items(), std::numeric_limits<double>::quiet_NaN());
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 || line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 3) throw ParseError(path, line_no, "expected user_id,item_id,score");
    const auto u = users.find(fields[0]);
    const auto it = items.find(fields[1]);
    if (u == users.end()) throw ParseError(path, line_no, "unknown user '" + fields[0] + "'");
    if (it == items.end()) throw ParseError(path, line_no, "unknown item '" + fields[1] + "'");
    double value = 0.0;
    const char* first = fields[2].data();
    const char* last = first + fields[2].size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
      throw ParseError(path, line_no, "bad score '" + fields[2] + "'");
    }
    scores(u->second, it->second) = value;
  }
  return scores;
}

int cmd_eval(const Globals& g, const EvalOptions& e, std::ostream& out, std::ostream& err) {
  require(e.split, "--split");
  if (!e.scores.empty()) {
    require(e.target, "--target");
    const RawRatings raw = read_ratings_csv(e.target);
    print_warnings(err, raw.warnings);
    const RatingMatrix target = to_matrix(raw);
    const std::vector<UserSplit> splits = read_split_manifest(e.split, target);
    const Eigen::MatrixXd scores = read_scores_csv(e.scores, target);
    for (const UserSplit& s : splits) {
      const RankedList list = candidate_list(scores, s);
      for (std::size_t k = 0; k < list.items.size(); ++k) {
        if (std::isnan(list.scores[k])) {
          throw UsageError("scores file has no score for user '" +
                           target.user_ids()[static_cast<std::size_t>(s.user)] + "' and item '" +
                           target.item_ids()[static_cast<std::size_t>(list.items[k])] + "'");
        }
      }
    }
    write_metrics(g, summarize_ranks(rank_splits(scores, splits), "scores"), out);
    return kExitOk;
  }
  require(e.checkpoint, "--checkpoint");
  const HeteroModel model = load_checkpoint(e.checkpoint);
  const bool needs_source = model.variant != ModelVariant::kTargetOnly;
  const TrainingData data = load_training_data(e.published, e.target, e.split, needs_source, err);
  const Eigen::MatrixXd scores = score_matrix(model, data.cdr);
  write_metrics(g, summarize_ranks(rank_splits(scores, data.splits), run_name(model)), out);
  return kExitOk;
}

int cmd_synth(const Globals& g, const SynthOptions& s, std::ostream& out, std::ostream& err) {
  SynthConfig cfg = s.config;
  cfg.seed = g.seed;
  cfg.validate();
  if (s.min_interactions < 1) throw UsageError("--min-interactions must be >= 1");
  const TwoDomain generated = synth_two_domain(cfg);
  // Positives are 1, so a threshold of 1 keeps them all.
  const TwoDomain data = preprocess_two_domain(to_raw(generated.source), to_raw(generated.target),
                                               1.0, s.min_interactions);
  print_warnings(err, data.warnings);
  for (const auto& [name, matrix] : {std::pair{"source.csv", &data.source},
                                     std::pair{"target.csv", &data.target}}) {
    const fs::path path = output_path(g, name);
    std::ofstream f = open_output(path);
    write_ratings_csv(f, *matrix);
    close_output(f, path);
  }
  out << "wrote " << data.source.users() << " users, " << data.source.items()
      << " source items, " << data.target.items() << " target items to " << g.out_dir << '\n';
  return kExitOk;
}

int cmd_split(const Globals& g, const SplitOptions& s, std::ostream& out, std::ostream& err) {
  require(s.target, "--target");
  const RawRatings raw = read_ratings_csv(s.target);
  print_warnings(err, raw.warnings);
  const RatingMatrix target = to_matrix(raw);
  const LeaveOneOut split = make_leave_one_out(target, g.seed, s.negatives);
  print_warnings(err, split.warnings);
  const fs::path path = output_path(g, "split.jsonl");
  std::ofstream f = open_output(path);
  write_split_manifest(f, target, split.splits);
  close_output(f, path);
  out << "split " << split.splits.size() << " of " << target.users() << " users to "
      << path.string() << '\n';
  return kExitOk;
}

int cmd_bench(const Globals& g, const BenchOptions& b, std::ostream& out) {
  BenchConfig cfg;
  if (b.transform == "both") {
    cfg.transforms = {TransformKind::kJlt, TransformKind::kSjlt};
  } else {
    cfg.transforms = {parse_transform_kind(b.transform)};
  }
  cfg.sizes = b.sizes;
  cfg.n1_prime = b.n1_prime;
  cfg.users = b.users;
  cfg.q = b.q;
  cfg.reps = b.reps;
  cfg.seed = g.seed;
  const std::vector<BenchRow> rows = run_bench(cfg);
  const fs::path path = output_path(g, "bench.csv");
  std::ofstream f = open_output(path);
  write_bench_csv(f, rows);
  close_output(f, path);
  write_bench_csv(out, rows);
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Differentially private rating publishing and cross-domain recommendation",
               "dpcdr"};
  app.option_defaults()->always_capture_default();
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON config file (flags take precedence)");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--out-dir", g.out_dir, "directory for outputs and the config snapshot");
  app.add_option("--threads", g.threads, "worker threads for verify")
      ->check(CLI::PositiveNumber);

  PublishOptions pub;
  CLI::App* publish_cmd = app.add_subcommand("publish", "publish a source rating matrix");
  publish_cmd->add_option("--input", pub.input, "ratings CSV (user_id,item_id,rating)");
  add_publish_params(publish_cmd, pub);
  publish_cmd->add_flag("--csv", pub.csv, "also write published.csv");

  PublishOptions verify_pub;
  VerifyOptions ver;
  CLI::App* verify_cmd = app.add_subcommand("verify", "Monte-Carlo checks of the mechanism");
  verify_cmd->add_option("suite", ver.suite, "expectation, rip, preconditioner, privacy or all")
      ->required();
  verify_cmd->add_option("--trials", ver.trials, "trials per check");
  verify_cmd->add_option("--confidence", ver.confidence, "required pass fraction");
  verify_cmd->add_option("--users", ver.users, "rows m of the random input");
  verify_cmd->add_option("--items", ver.items, "columns n1 of the random input");
  verify_cmd->add_option("--gamma", ver.gamma, "RIP band half-width");
  verify_cmd->add_option("--w", ver.w, "noise level override (negative: calibrated)");
  add_publish_params(verify_cmd, verify_pub);

  TrainOptions tr;
  CLI::App* train_cmd = app.add_subcommand("train", "train a cross-domain model");
  train_cmd->add_option("--published", tr.published, "published source matrix");
  train_cmd->add_option("--target", tr.target, "target ratings CSV");
  train_cmd->add_option("--split", tr.split, "split manifest; held-out items are hidden");
  train_cmd->add_option("--variant", tr.variant, "hetero, pricdr-sym or target-only");
  train_cmd->add_option("--alpha", tr.alpha, "alignment weight");
  train_cmd->add_option("--batch", tr.batch, "users per batch");
  train_cmd->add_option("--epochs", tr.epochs, "training epochs");
  train_cmd->add_option("--lr", tr.lr, "Adam learning rate");
  train_cmd->add_option("--negatives", tr.negatives, "sampled negatives per positive");
  train_cmd->add_option("--embedding-dim", tr.h, "embedding dimension");
  train_cmd->add_option("--hidden", tr.hidden, "hidden layer widths");

  EvalOptions ev;
  CLI::App* eval_cmd = app.add_subcommand("eval", "rank held-out items and write metrics");
  eval_cmd->add_option("--checkpoint", ev.checkpoint, "model checkpoint");
  eval_cmd->add_option("--published", ev.published, "published source matrix");
  eval_cmd->add_option("--target", ev.target, "target ratings CSV");
  eval_cmd->add_option("--split", ev.split, "split manifest");
  eval_cmd->add_option("--scores", ev.scores, "score CSV (user_id,item_id,score) to rank instead");

  SynthOptions sy;
  CLI::App* synth_cmd = app.add_subcommand("synth", "generate a synthetic two-domain dataset");
  synth_cmd->add_option("--users", sy.config.users, "users");
  synth_cmd->add_option("--items", sy.config.items_per_domain, "items per domain");
  synth_cmd->add_option("--latent-dim", sy.config.latent_dim, "latent factor dimension");
  synth_cmd->add_option("--noise", sy.config.noise, "log-score noise weight");
  synth_cmd->add_option("--latent-sigma", sy.config.latent_sigma, "log-scale factor spread");
  synth_cmd->add_option("--source-density", sy.config.source_density, "source positive rate");
  synth_cmd->add_option("--target-density", sy.config.target_density, "target positive rate");
  synth_cmd->add_option("--min-interactions", sy.min_interactions,
                        "drop users and items with fewer positives");

  SplitOptions sp;
  CLI::App* split_cmd = app.add_subcommand("split", "leave-one-out split of a target CSV");
  split_cmd->add_option("--target", sp.target, "target ratings CSV");
  split_cmd->add_option("--negatives", sp.negatives, "sampled negatives per user");

  BenchOptions be;
  CLI::App* bench_cmd = app.add_subcommand("bench", "time the JLT and SJLT projections");
  bench_cmd->add_option("--transform", be.transform, "jlt, sjlt or both");
  bench_cmd->add_option("--sizes", be.sizes, "item dimensions n1");
  bench_cmd->add_option("--n1-prime", be.n1_prime, "projected dimension");
  bench_cmd->add_option("--users", be.users, "users m");
  bench_cmd->add_option("--q,--sp", be.q, "sparse non-zero probability (0: 1/m)");
  bench_cmd->add_option("--reps", be.reps, "repetitions (median is reported)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    fs::create_directories(g.out_dir);
    CLI::App* cmd = app.get_subcommands().front();
    const fs::path snapshot = output_path(g, cmd->get_name() + ".config.json");
    std::ofstream f = open_output(snapshot);
    f << app.config_to_str(true, false);
    close_output(f, snapshot);

    if (cmd == publish_cmd) return cmd_publish(g, pub, out, err);
    if (cmd == verify_cmd) return cmd_verify(g, verify_pub, ver, out);
    if (cmd == train_cmd) return cmd_train(g, tr, out, err);
    if (cmd == eval_cmd) return cmd_eval(g, ev, out, err);
    if (cmd == synth_cmd) return cmd_synth(g, sy, out, err);
    if (cmd == split_cmd) return cmd_split(g, sp, out, err);
    if (cmd == bench_cmd) return cmd_bench(g, be, out);
    err << "error: no subcommand\n";
    return kExitUsage;
  } catch (const NumericError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
}

}  // namespace dpcdr::cli

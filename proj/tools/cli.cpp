// Copyright 2026 The Peephole Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "peephole/arch_io.hpp"
#include "peephole/checkpoint.hpp"
#include "peephole/dataset.hpp"
#include "peephole/errors.hpp"
#include "peephole/features.hpp"
#include "peephole/generator.hpp"
#include "peephole/model_check.hpp"
#include "peephole/trainer.hpp"

namespace peephole::cli {

namespace {

namespace fs = std::filesystem;

std::string real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void require_input(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw DataError("no such file: " + path.string());
}

void require_output(const fs::path& path) {
  const fs::path dir = path.parent_path();
  if (!dir.empty() && !fs::is_directory(dir)) throw DataError("output directory does not exist: " + dir.string());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw DataError("write failed: " + path.string());
}

int worker_count(int requested) {
  if (requested > 0) return requested;
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

struct Options {
  std::optional<std::uint64_t> seed;
  int threads = 0;

  // generate
  int count = 1000;
  SkeletonConfig skeleton;
  std::string out_path;

  // label
  std::string archs_path;
  int T = 60;

  // train
  TrainConfig train;
  std::string data_path;
  std::string history_path;
  std::string metrics_path;
  bool quiet = false;

  // predict, rank, eval, features
  std::string model_path;
  std::string arch_path;
  int epoch = 60;
  std::optional<std::size_t> top;
  std::string split = "all";

  // gradcheck
  ModelGradCheckConfig check;
  double tolerance = 1e-4;
  double control_threshold = 1e-3;
};

void add_hyper_flags(CLI::App* cmd, PeepholeHyper& h) {
  cmd->add_option("--hidden", h.hidden, "LSTM hidden size")->capture_default_str();
  cmd->add_option("--epoch-dim", h.epoch_dim, "Epoch embedding width")->capture_default_str();
  cmd->add_option("--mlp-hidden", h.mlp_hidden, "MLP hidden width")->capture_default_str();
  cmd->add_option("--t-max", h.T_max, "Largest epoch index the model accepts")->capture_default_str();
}

std::vector<Sample> pick_split(const std::vector<Sample>& data, const Options& o) {
  if (o.split == "all") return data;
  const DataSplit s = split_dataset(data.size(), o.train.val_fraction, o.seed.value_or(o.train.seed));
  const auto& idx = o.split == "train" ? s.train : s.val;
  std::vector<Sample> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(data[i]);
  return out;
}

int cmd_generate(Options& o, std::ostream& out, std::ostream& err) {
  require_output(o.out_path);
  if (o.seed) o.skeleton.rng_seed = *o.seed;
  if (o.count < 1) throw DataError("--count must be >= 1");
  const auto archs = generate_archs(o.count, o.skeleton, worker_count(o.threads));
  write_archs_jsonl(o.out_path, archs);
  err << "wrote " << archs.size() << " architectures to " << o.out_path << '\n';
  (void)out;
  return kExitOk;
}

int cmd_label(Options& o, std::ostream&, std::ostream& err) {
  require_input(o.archs_path);
  require_output(o.out_path);
  const auto archs = read_archs_jsonl(o.archs_path);
  const auto data = label_dataset(archs, o.T, oracle_accuracy, worker_count(o.threads));
  write_dataset(o.out_path, data);
  err << "labeled " << data.size() << " architectures at T = " << o.T << '\n';
  return kExitOk;
}

int cmd_train(Options& o, std::ostream& out, std::ostream& err) {
  require_input(o.data_path);
  require_output(o.out_path);
  if (!o.history_path.empty()) require_output(o.history_path);
  if (!o.metrics_path.empty()) require_output(o.metrics_path);
  if (o.seed) o.train.seed = *o.seed;
  const auto data = read_dataset(o.data_path);
  const TrainResult r = train(o.train, data, [&](const EpochRecord& e) {
    if (o.quiet) return;
    err << "epoch " << e.epoch << '/' << o.train.epochs << " lr " << e.lr << " loss " << e.train_loss << " val_mse "
        << e.val_mse;
    if (e.val_tau) err << " tau " << *e.val_tau;
    if (e.val_r2) err << " r2 " << *e.val_r2;
    err << '\n';
  });
  save_checkpoint(r.params, o.out_path);
  std::vector<Sample> val;
  for (auto i : r.split.val) val.push_back(data[i]);
  const std::string report = metrics_to_json(evaluate(r.params, val));
  if (!o.history_path.empty()) write_text(o.history_path, history_to_json(r.history) + "\n");
  if (!o.metrics_path.empty()) write_text(o.metrics_path, report + "\n");
  err << "best epoch " << r.best_epoch << ", checkpoint " << o.out_path << '\n';
  out << report << '\n';
  return kExitOk;
}

int cmd_predict(Options& o, std::ostream& out, std::ostream& err) {
  require_input(o.model_path);
  require_input(o.arch_path);
  const PeepholeParams params = load_checkpoint(o.model_path);
  const NetworkArch arch = read_arch_file(o.arch_path);
  const auto codes = encode_network(arch);
  out << real(predict(params, codes, o.epoch)) << '\n';
  err << codes.size() << " layers, epoch " << o.epoch << '\n';
  return kExitOk;
}

int cmd_rank(Options& o, std::ostream& out, std::ostream&) {
  require_input(o.model_path);
  require_input(o.archs_path);
  const PeepholeParams params = load_checkpoint(o.model_path);
  const auto archs = read_archs_jsonl(o.archs_path);
  std::vector<std::vector<LayerCode>> codes;
  codes.reserve(archs.size());
  for (const auto& a : archs) codes.push_back(encode_network(a));
  std::vector<Example> examples;
  for (const auto& c : codes) examples.push_back({c, o.epoch, 0.0});
  const auto scores = predict_batch(params, examples);
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  const std::size_t shown = std::min(order.size(), o.top.value_or(order.size()));
  for (std::size_t k = 0; k < shown; ++k) {
    out << k + 1 << '\t' << order[k] << '\t' << real(scores[order[k]]) << '\n';
  }
  return kExitOk;
}

int cmd_eval(Options& o, std::ostream& out, std::ostream& err) {
  require_input(o.model_path);
  require_input(o.data_path);
  const PeepholeParams params = load_checkpoint(o.model_path);
  const auto data = pick_split(read_dataset(o.data_path), o);
  out << metrics_to_json(evaluate(params, data)) << '\n';
  err << "evaluated " << data.size() << " samples (" << o.split << ")\n";
  return kExitOk;
}

int cmd_features(Options& o, std::ostream&, std::ostream& err) {
  require_input(o.model_path);
  require_input(o.archs_path);
  require_output(o.out_path);
  const PeepholeParams params = load_checkpoint(o.model_path);
  const auto archs = read_archs_jsonl(o.archs_path);
  export_features(params, archs, o.out_path);
  err << "wrote " << archs.size() << " feature rows to " << o.out_path << '\n';
  return kExitOk;
}

int cmd_gradcheck(Options& o, std::ostream& out, std::ostream&) {
  if (o.seed) o.check.seeds = {*o.seed, *o.seed + 1, *o.seed + 2};
  bool ok = true;
  for (int length : o.check.lengths) {
    for (std::uint64_t seed : o.check.seeds) {
      const auto c = model_grad_check_case(o.check, length, seed);
      const bool pass = c.exact.max_rel_error < o.tolerance && c.corrupted.max_rel_error > o.control_threshold;
      ok = ok && pass;
      out << (pass ? "ok   " : "FAIL ") << to_string(c) << '\n';
    }
  }
  out << (ok ? "PASS" : "FAIL") << '\n';
  if (!ok) throw NumericError("gradient check failed");
  return kExitOk;
}

}  // namespace

int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Peephole: predict network accuracy from its architecture", "peephole"};
  app.set_config("--config", "", "TOML/INI file with defaults; command-line flags take precedence");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);
  app.add_option("--seed", o.seed, "Random seed (generation, split, shuffling or gradient check)");
  app.add_option("--threads", o.threads, "Worker threads; 0 uses every core")->capture_default_str();

  auto* gen = app.add_subcommand("generate", "Sample architectures from the block generator");
  gen->add_option("--count", o.count, "Number of architectures")->capture_default_str();
  gen->add_option("--out", o.out_path, "Output JSONL")->required();
  gen->add_option("--stages", o.skeleton.stages)->capture_default_str();
  gen->add_option("--blocks-per-stage", o.skeleton.blocks_per_stage)->capture_default_str();
  gen->add_option("--stem-channels", o.skeleton.stem_channels)->capture_default_str();
  gen->add_option("--input-channels", o.skeleton.input_channels)->capture_default_str();
  gen->add_option("--bn-probability", o.skeleton.bn_probability)->capture_default_str();
  gen->add_option("--dataset-tag", o.skeleton.dataset_tag)->capture_default_str();

  auto* label = app.add_subcommand("label", "Attach synthetic learning curves");
  label->add_option("--archs", o.archs_path, "Architecture JSONL")->required();
  label->add_option("--out", o.out_path, "Dataset JSONL")->required();
  label->add_option("-T,--T", o.T, "Training length in epochs")->capture_default_str();

  auto* trn = app.add_subcommand("train", "Fit the predictor to a dataset");
  trn->add_option("--data", o.data_path, "Dataset JSONL")->required();
  trn->add_option("--out", o.out_path, "Checkpoint path")->required();
  trn->add_option("--epochs", o.train.epochs)->capture_default_str();
  trn->add_option("--batch-size", o.train.batch_size)->capture_default_str();
  trn->add_option("--lr", o.train.lr)->capture_default_str();
  trn->add_option("--lr-decay-every", o.train.lr_decay_every)->capture_default_str();
  trn->add_option("--lr-decay-factor", o.train.lr_decay_factor)->capture_default_str();
  trn->add_option("--momentum", o.train.momentum)->capture_default_str();
  trn->add_option("--weight-decay", o.train.weight_decay)->capture_default_str();
  trn->add_option("--val-fraction", o.train.val_fraction)->capture_default_str();
  trn->add_option("--history", o.history_path, "Write per-epoch history JSON here");
  trn->add_option("--metrics", o.metrics_path, "Write held-out metrics JSON here");
  trn->add_flag("--quiet", o.quiet, "No per-epoch progress");
  add_hyper_flags(trn, o.train.hyper);

  auto* pred = app.add_subcommand("predict", "Predicted accuracy of one architecture");
  pred->add_option("--model", o.model_path, "Checkpoint")->required();
  pred->add_option("--arch", o.arch_path, "Architecture JSON")->required();
  pred->add_option("--epoch", o.epoch, "Epoch index")->capture_default_str();

  auto* rank = app.add_subcommand("rank", "Order a pool by predicted accuracy");
  rank->add_option("--model", o.model_path, "Checkpoint")->required();
  rank->add_option("--archs", o.archs_path, "Architecture or dataset JSONL")->required();
  rank->add_option("--epoch", o.epoch, "Epoch index")->capture_default_str();
  rank->add_option("--top", o.top, "Print only the best k");

  auto* ev = app.add_subcommand("eval", "MSE, Kendall's tau and R^2 on a dataset");
  ev->add_option("--model", o.model_path, "Checkpoint")->required();
  ev->add_option("--data", o.data_path, "Dataset JSONL")->required();
  ev->add_option("--split", o.split, "Which part of the training split to score")
      ->check(CLI::IsMember({"all", "train", "val"}))
      ->capture_default_str();
  ev->add_option("--val-fraction", o.train.val_fraction)->capture_default_str();

  auto* feat = app.add_subcommand("features", "Export structural features as CSV");
  feat->add_option("--model", o.model_path, "Checkpoint")->required();
  feat->add_option("--archs", o.archs_path, "Architecture or dataset JSONL")->required();
  feat->add_option("--out", o.out_path, "CSV path")->required();

  auto* gc = app.add_subcommand("gradcheck", "Finite-difference check of the full model gradient");
  gc->add_option("--lengths", o.check.lengths, "Sequence lengths")->capture_default_str();
  gc->add_option("--eps", o.check.eps)->capture_default_str();
  gc->add_option("--samples", o.check.samples_per_tensor, "Coordinates per tensor (0 checks all)")
      ->capture_default_str();
  gc->add_option("--tolerance", o.tolerance, "Largest accepted relative error")->capture_default_str();
  add_hyper_flags(gc, o.check.hyper);

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (gen->parsed()) return cmd_generate(o, out, err);
    if (label->parsed()) return cmd_label(o, out, err);
    if (trn->parsed()) return cmd_train(o, out, err);
    if (pred->parsed()) return cmd_predict(o, out, err);
    if (rank->parsed()) return cmd_rank(o, out, err);
    if (ev->parsed()) return cmd_eval(o, out, err);
    if (feat->parsed()) return cmd_features(o, out, err);
    if (gc->parsed()) return cmd_gradcheck(o, out, err);
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const Error& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace peephole::cli

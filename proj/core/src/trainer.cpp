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

#include "peephole/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "json.hpp"
#include "peephole/errors.hpp"
#include "peephole/optimizer.hpp"
#include "peephole/rng.hpp"

namespace peephole {

namespace {

// Sub-stream ids under the config seed.
constexpr std::uint64_t kSplitStream = 1;
constexpr std::uint64_t kInitStream = 2;
constexpr std::uint64_t kShuffleStream = 3;

constexpr std::size_t kEvalChunk = 64;

std::vector<Example> make_examples(std::span<const Sample> data, std::span<const std::size_t> indices,
                                   const std::vector<std::vector<LayerCode>>& codes) {
  std::vector<Example> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back({codes[i], data[i].T, data[i].final_target()});
  return out;
}

std::vector<double> predict_examples(const PeepholeParams& params, std::span<const Example> examples) {
  std::vector<double> out;
  out.reserve(examples.size());
  for (std::size_t start = 0; start < examples.size(); start += kEvalChunk) {
    const auto chunk = examples.subspan(start, std::min(kEvalChunk, examples.size() - start));
    const auto preds = predict_batch(params, chunk);
    out.insert(out.end(), preds.begin(), preds.end());
  }
  return out;
}

template <typename F>
std::optional<double> defined(F&& metric) {
  try {
    return metric();
  } catch (const MetricError&) {
    return std::nullopt;
  }
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs < 1) throw DataError("epochs must be >= 1");
  if (batch_size < 2) throw DataError("batch_size must be >= 2 (batch norm needs batch statistics)");
  if (!(lr >= 0.0)) throw DataError("lr must be >= 0");
  if (lr_decay_every < 1) throw DataError("lr_decay_every must be >= 1");
  if (!(lr_decay_factor > 0.0)) throw DataError("lr_decay_factor must be > 0");
  if (!(momentum >= 0.0)) throw DataError("momentum must be >= 0");
  if (!(weight_decay >= 0.0)) throw DataError("weight_decay must be >= 0");
  if (!(val_fraction > 0.0 && val_fraction < 1.0)) throw DataError("val_fraction must be in (0, 1)");
  hyper.validate();
}

double TrainConfig::lr_at(int epoch) const {
  return lr * std::pow(lr_decay_factor, (epoch - 1) / lr_decay_every);
}

DataSplit split_dataset(std::size_t n, double val_fraction, std::uint64_t seed) {
  if (n < 2) throw DataError("need at least 2 samples to split");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(child_seed(seed, kSplitStream));
  rng.shuffle(std::span(order));
  const auto wanted = static_cast<std::size_t>(std::llround(val_fraction * static_cast<double>(n)));
  const std::size_t n_val = std::clamp<std::size_t>(wanted, 1, n - 1);
  DataSplit split;
  split.val.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
  split.train.assign(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());
  std::sort(split.val.begin(), split.val.end());
  std::sort(split.train.begin(), split.train.end());
  return split;
}

TrainResult train(const TrainConfig& config, std::span<const Sample> data, const EpochCallback& on_epoch) {
  config.validate();
  if (data.size() < 2) throw DataError("train: need at least 2 samples");

  std::vector<std::vector<LayerCode>> codes;
  codes.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& s = data[i];
    if (s.T < 1 || s.T > config.hyper.T_max) {
      throw DataError("sample " + std::to_string(i) + ": T = " + std::to_string(s.T) + " outside [1, T_max]");
    }
    const double y = s.final_target();
    if (!(y >= 0.0 && y <= 1.0)) throw DataError("sample " + std::to_string(i) + ": target outside [0, 1]");
    codes.push_back(encode_network(s.arch));
  }

  TrainResult result;
  result.split = split_dataset(data.size(), config.val_fraction, config.seed);
  const auto& split = result.split;
  if (split.train.size() < static_cast<std::size_t>(config.batch_size)) {
    throw DataError("train: " + std::to_string(split.train.size()) + " training samples is fewer than batch_size " +
                    std::to_string(config.batch_size));
  }
  const auto val_examples = make_examples(data, split.val, codes);
  std::vector<double> val_targets;
  for (const auto& ex : val_examples) val_targets.push_back(ex.target);

  PeepholeParams params = init_params(child_seed(config.seed, kInitStream), config.hyper);
  PeepholeParams grads = PeepholeParams::zeros(config.hyper);
  std::vector<nn::Tensor*> param_list;
  std::vector<nn::Tensor*> grad_tensors;
  for (auto& t : params.trainable()) param_list.push_back(t.tensor);
  for (auto& t : grads.trainable()) grad_tensors.push_back(t.tensor);
  const std::vector<const nn::Tensor*> grad_list(grad_tensors.begin(), grad_tensors.end());
  nn::OptState opt = nn::OptState::for_params(param_list, {config.lr, config.momentum, config.weight_decay});

  Rng shuffle_rng(child_seed(config.seed, kShuffleStream));
  std::vector<std::size_t> order = split.train;
  double best_mse = std::numeric_limits<double>::infinity();
  const auto batch_size = static_cast<std::size_t>(config.batch_size);

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    opt.config.lr = config.lr_at(epoch);
    shuffle_rng.shuffle(std::span(order));

    double loss_sum = 0.0;
    std::size_t seen = 0;
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
      const std::size_t count = std::min(batch_size, order.size() - start);
      if (count < 2) break;  // batch statistics need two samples
      const auto batch = make_examples(data, std::span(order).subspan(start, count), codes);
      for (auto* g : grad_tensors) g->fill(0.0);
      const BatchLoss step = loss_and_grad(params, batch, &grads);
      if (!std::isfinite(step.loss)) {
        throw NumericError("train: non-finite loss at epoch " + std::to_string(epoch) + ", batch starting at " +
                           std::to_string(start) + " (lr " + std::to_string(opt.config.lr) + ")");
      }
      nn::sgd_step(param_list, grad_list, opt);
      apply_batch_statistics(params, step, count);
      loss_sum += step.loss * static_cast<double>(count);
      seen += count;
    }

    EpochRecord record;
    record.epoch = epoch;
    record.lr = opt.config.lr;
    record.train_loss = loss_sum / static_cast<double>(seen);
    const auto preds = predict_examples(params, val_examples);
    record.val_mse = mse(preds, val_targets);
    if (!std::isfinite(record.val_mse)) {
      throw NumericError("train: non-finite validation error at epoch " + std::to_string(epoch));
    }
    record.val_tau = defined([&] { return kendall_tau(preds, val_targets); });
    record.val_r2 = defined([&] { return r_squared(preds, val_targets); });
    if (record.val_mse < best_mse) {
      best_mse = record.val_mse;
      result.best_epoch = epoch;
      result.params = params;
    }
    result.history.push_back(record);
    if (on_epoch) on_epoch(record);
  }
  return result;
}

std::vector<double> predict_samples(const PeepholeParams& params, std::span<const Sample> data) {
  std::vector<std::vector<LayerCode>> codes;
  codes.reserve(data.size());
  for (const auto& s : data) codes.push_back(encode_network(s.arch));
  std::vector<Example> examples;
  examples.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) examples.push_back({codes[i], data[i].T, 0.0});
  return predict_examples(params, examples);
}

Metrics evaluate(const PeepholeParams& params, std::span<const Sample> data) {
  if (data.empty()) throw DataError("evaluate: no samples");
  const auto preds = predict_samples(params, data);
  std::vector<double> actual;
  actual.reserve(data.size());
  for (const auto& s : data) actual.push_back(s.final_target());
  return compute_metrics(preds, actual);
}

std::string history_to_json(const std::vector<EpochRecord>& history) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : history) {
    nlohmann::json row = {{"epoch", r.epoch}, {"lr", r.lr}, {"train_loss", r.train_loss}, {"val_mse", r.val_mse}};
    row["val_tau"] = r.val_tau ? nlohmann::json(*r.val_tau) : nlohmann::json(nullptr);
    row["val_r2"] = r.val_r2 ? nlohmann::json(*r.val_r2) : nlohmann::json(nullptr);
    out.push_back(std::move(row));
  }
  return out.dump();
}

}  // namespace peephole

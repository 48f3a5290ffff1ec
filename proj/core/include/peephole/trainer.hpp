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

#ifndef PEEPHOLE_TRAINER_HPP_
#define PEEPHOLE_TRAINER_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "peephole/dataset.hpp"
#include "peephole/metrics.hpp"
#include "peephole/predictor.hpp"

namespace peephole {

struct TrainConfig {
  int epochs = 100;
  int batch_size = 32;
  double lr = 0.01;
  int lr_decay_every = 40;
  double lr_decay_factor = 0.1;
  double momentum = 0.9;
  double weight_decay = 1e-4;
  std::uint64_t seed = 42;
  double val_fraction = 0.2;
  PeepholeHyper hyper;

  void validate() const;
  /// Learning rate in effect during `epoch` (1-based).
  double lr_at(int epoch) const;
};

struct DataSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
};

/// Deterministic shuffle split; round(val_fraction * n) validation items,
/// at least one on each side. Both index lists are returned sorted.
DataSplit split_dataset(std::size_t n, double val_fraction, std::uint64_t seed);

struct EpochRecord {
  int epoch = 0;
  double lr = 0.0;
  double train_loss = 0.0;
  double val_mse = 0.0;
  /// Absent when undefined (e.g. all validation targets equal).
  std::optional<double> val_tau;
  std::optional<double> val_r2;
};

struct TrainResult {
  /// Parameters from the epoch with the lowest validation MSE.
  PeepholeParams params;
  int best_epoch = 0;
  std::vector<EpochRecord> history;
  DataSplit split;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Minimizes the mean smooth-L1 loss between predict(x, T) and y(T) with
/// momentum SGD over shuffled mini-batches. Only each sample's final-epoch
/// label is read. Throws DataError when the training split is smaller than a
/// batch and NumericError when the loss stops being finite.
TrainResult train(const TrainConfig& config, std::span<const Sample> data, const EpochCallback& on_epoch = {});

/// Predictions at each sample's T.
std::vector<double> predict_samples(const PeepholeParams& params, std::span<const Sample> data);

/// MSE, Kendall's tau and R^2 of predictions at T against y(T).
Metrics evaluate(const PeepholeParams& params, std::span<const Sample> data);

/// JSON array of epoch records; null for undefined metrics.
std::string history_to_json(const std::vector<EpochRecord>& history);

}  // namespace peephole

#endif  // PEEPHOLE_TRAINER_HPP_

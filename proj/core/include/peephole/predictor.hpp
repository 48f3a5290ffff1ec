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

#ifndef PEEPHOLE_PREDICTOR_HPP_
#define PEEPHOLE_PREDICTOR_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "peephole/layercode.hpp"
#include "peephole/lstm.hpp"
#include "peephole/ops.hpp"
#include "peephole/tensor.hpp"

namespace peephole {

/// Width of a layer embedding: type + 2 x kernel + channel sub-vectors.
inline constexpr int kLayerEmbeddingWidth = 40;
inline constexpr int kCheckpointFormatVersion = 1;

struct PeepholeHyper {
  int d_type = 10;
  int d_kernel = 10;
  int d_channel = 10;
  int hidden = 160;
  int epoch_dim = 40;
  int mlp_hidden = 200;
  /// Largest epoch index the epoch table covers.
  int T_max = 100;
  int max_sequence = 256;

  int layer_dim() const { return d_type + 2 * d_kernel + d_channel; }
  int mlp_input() const { return hidden + epoch_dim; }

  /// Throws DataError on inconsistent sizes (layer_dim() must be 40).
  void validate() const;

  friend bool operator==(const PeepholeHyper&, const PeepholeHyper&) = default;
};

struct EmbeddingTables {
  nn::Tensor type;     // [7 x d_type]
  nn::Tensor kernel;   // [5 x d_kernel], shared by KW and KH
  nn::Tensor channel;  // [8 x d_channel]
  nn::Tensor epoch;    // [T_max x epoch_dim]
};

/// affine -> batch norm -> relu, twice, then affine to a scalar.
struct MlpHead {
  nn::Tensor fc1_weight, fc1_bias;
  nn::BatchNormParams bn1;
  nn::Tensor fc2_weight, fc2_bias;
  nn::BatchNormParams bn2;
  nn::Tensor fc3_weight, fc3_bias;
};

struct NamedTensor {
  std::string name;
  nn::Tensor* tensor;
};

struct PeepholeParams {
  PeepholeHyper hyper;
  EmbeddingTables tables;
  nn::LstmParams lstm;
  MlpHead mlp;

  /// All tensors zero-filled (running variances too); used for gradients.
  static PeepholeParams zeros(const PeepholeHyper& hyper);

  /// Learnable tensors, in a fixed order.
  std::vector<NamedTensor> trainable();
  /// Learnable tensors followed by the batch-norm running statistics.
  std::vector<NamedTensor> all_tensors();

  /// Throws DimensionError when a tensor disagrees with `hyper`.
  void validate() const;
};

/// Glorot-uniform weights, N(0, 0.1) embeddings, zero biases except the
/// forget-gate bias (1.0), identity batch norm. Deterministic in `seed`.
PeepholeParams init_params(std::uint64_t seed, const PeepholeHyper& hyper = {});

/// [type | kernel(kw) | kernel(kh) | channel] rows, concatenated.
std::vector<double> embed_layer(const EmbeddingTables& tables, const LayerCode& code);

/// Final LSTM hidden state over the embedded sequence.
std::vector<double> structural_feature(const PeepholeParams& params, std::span<const LayerCode> codes);

/// Predicted accuracy at `epoch` (1-based), using running batch-norm
/// statistics. Throws DataError for an empty sequence or epoch outside
/// [1, T_max].
double predict(const PeepholeParams& params, std::span<const LayerCode> codes, int epoch);

struct Example {
  std::span<const LayerCode> codes;
  int epoch = 1;
  double target = 0.0;
};

/// predict() over many examples at once; results equal predict() bitwise.
std::vector<double> predict_batch(const PeepholeParams& params, std::span<const Example> batch);

/// Structural features of many sequences at once, [batch x hidden].
nn::Tensor structural_features(const PeepholeParams& params, std::span<const std::vector<LayerCode>> sequences);

struct BatchLoss {
  double loss = 0.0;
  std::vector<double> predictions;
  nn::BatchNormCache bn1;
  nn::BatchNormCache bn2;
};

/// Training-mode forward (batch statistics) of the mean smooth-L1 loss over
/// the batch. When `grads` is non-null the gradient is accumulated into it.
/// Running statistics are not touched; see apply_batch_statistics.
BatchLoss loss_and_grad(const PeepholeParams& params, std::span<const Example> batch, PeepholeParams* grads);

void apply_batch_statistics(PeepholeParams& params, const BatchLoss& result, std::size_t batch_size);

}  // namespace peephole

#endif  // PEEPHOLE_PREDICTOR_HPP_

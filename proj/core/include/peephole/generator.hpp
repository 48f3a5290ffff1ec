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

#ifndef PEEPHOLE_GENERATOR_HPP_
#define PEEPHOLE_GENERATOR_HPP_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "peephole/layercode.hpp"
#include "peephole/rng.hpp"

namespace peephole {

/// States of the layer-type Markov chain, in row/column order. Batch
/// normalization is not a state; it is inserted after convolutions.
inline constexpr std::array<LayerKind, 6> kChainKinds = {
    LayerKind::kConv, LayerKind::kMaxPool, LayerKind::kAvgPool,
    LayerKind::kReLU, LayerKind::kSigmoid, LayerKind::kTanh};

/// Row index of `kind` in the chain; throws DataError for batch norm.
std::size_t chain_index(LayerKind kind);

struct TransitionMatrix {
  using Row = std::array<double, kChainKinds.size()>;
  std::array<Row, kChainKinds.size()> rows{};

  /// The published block-generation transition probabilities.
  static TransitionMatrix standard();

  const Row& row(LayerKind current) const { return rows[chain_index(current)]; }

  /// Throws DataError unless every entry is non-negative and every row sums
  /// to 1 within 1e-9.
  void validate() const;
};

/// Draws the kind following `current` from its row of `matrix`.
LayerKind next_layer_type(Rng& rng, LayerKind current,
                          const TransitionMatrix& matrix = TransitionMatrix::standard());

struct BlockLimits {
  int max_layers = 10;
  int max_convs = 3;
  /// Lower end of the uniform target-length draw.
  int min_target_length = 4;
  double bn_probability = 0.6;
  TransitionMatrix transitions = TransitionMatrix::standard();
};

struct Block {
  std::vector<LayerSpec> layers;

  friend bool operator==(const Block&, const Block&) = default;
};

/// Samples one block: a convolution with uniform square kernel in {1..5} and
/// uniform ratio over the bin centers, then Markov transitions until a target
/// length drawn from {min_target_length..max_layers} is reached. Each
/// convolution is followed by batch norm with probability bn_probability
/// (room permitting). Once max_convs convolutions exist the chain samples
/// from its row with the conv column removed. Pools are square, 2x2 or 3x3.
Block sample_block(Rng& rng, const BlockLimits& limits = {});

/// Constraint violations of a block (empty when it is well formed).
std::vector<std::string> block_violations(const Block& block, const BlockLimits& limits = {});

struct SkeletonConfig {
  int stages = 3;
  int blocks_per_stage = 2;
  int stem_channels = 16;
  /// Channels of the network input (RGB images).
  int input_channels = 3;
  double bn_probability = 0.6;
  /// Training length recorded for labeling.
  int epochs_T = 60;
  std::uint64_t rng_seed = 42;
  std::string dataset_tag = "synthetic";

  void validate() const;
  BlockLimits block_limits() const;
};

/// Stem conv 3x3, then for every stage `blocks_per_stage` copies of the
/// stage's block followed by a 2x2 max pool. Stage s uses
/// blocks[s % blocks.size()]. A block instance expects the channel count seen
/// at that block's first placement; a 1x1 conv adapter is inserted whenever
/// the running count differs. Global pooling and the classifier are omitted.
NetworkArch assemble_network(std::span<const Block> blocks, const SkeletonConfig& cfg);

/// `count` architectures, item i built from an isolated generator seeded by
/// child_seed(cfg.rng_seed, i). The result does not depend on `threads`.
std::vector<NetworkArch> generate_archs(int count, const SkeletonConfig& cfg, int threads = 1);

}  // namespace peephole

#endif  // PEEPHOLE_GENERATOR_HPP_

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

#include "peephole/generator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <thread>

#include "peephole/errors.hpp"

namespace peephole {

namespace {

double clamp_ratio(double r) {
  return std::clamp(r, kChannelBinCenters.front(), kChannelBinCenters.back());
}

// Bin center that encodes `r`.
double snap_ratio(double r) { return dequantize_bin(quantize_ratio(clamp_ratio(r))); }

int scale_channels(int channels, double ratio) {
  const long scaled = std::lround(static_cast<double>(channels) * dequantize_bin(quantize_ratio(ratio)));
  return static_cast<int>(std::max(1L, scaled));
}

LayerSpec random_conv(Rng& rng) {
  const int k = rng.uniform_int(1, kMaxKernel);
  const double ratio = kChannelBinCenters[static_cast<std::size_t>(rng.uniform_int(0, kNumChannelBins - 1))];
  return LayerSpec::conv(k, k, ratio);
}

}  // namespace

std::size_t chain_index(LayerKind kind) {
  for (std::size_t i = 0; i < kChainKinds.size(); ++i) {
    if (kChainKinds[i] == kind) return i;
  }
  throw DataError(std::string(kind_name(kind)) + " is not a Markov chain state");
}

TransitionMatrix TransitionMatrix::standard() {
  TransitionMatrix m;
  //           Conv  MP    AP    ReLU  Sigm  Tanh
  m.rows[0] = {0.03, 0.03, 0.03, 0.31, 0.30, 0.30};
  m.rows[1] = {0.60, 0.05, 0.05, 0.10, 0.10, 0.10};
  m.rows[2] = {0.60, 0.05, 0.05, 0.10, 0.10, 0.10};
  m.rows[3] = {0.30, 0.30, 0.30, 0.00, 0.05, 0.05};
  m.rows[4] = {0.30, 0.30, 0.30, 0.05, 0.00, 0.05};
  m.rows[5] = {0.30, 0.30, 0.30, 0.05, 0.05, 0.00};
  return m;
}

void TransitionMatrix::validate() const {
  for (std::size_t r = 0; r < rows.size(); ++r) {
    double sum = 0.0;
    for (double p : rows[r]) {
      if (!(p >= 0.0)) throw DataError("transition row " + std::to_string(r) + " has a negative entry");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw DataError("transition row " + std::to_string(r) + " does not sum to 1");
    }
  }
}

LayerKind next_layer_type(Rng& rng, LayerKind current, const TransitionMatrix& matrix) {
  return kChainKinds[rng.categorical(matrix.row(current))];
}

Block sample_block(Rng& rng, const BlockLimits& limits) {
  Block block;
  int convs = 0;
  const int target = rng.uniform_int(std::min(limits.min_target_length, limits.max_layers), limits.max_layers);

  auto push_conv = [&](LayerSpec conv) {
    block.layers.push_back(conv);
    ++convs;
    if (static_cast<int>(block.layers.size()) < limits.max_layers && rng.bernoulli(limits.bn_probability)) {
      block.layers.push_back(LayerSpec::unit(LayerKind::kBatchNorm));
    }
  };

  push_conv(random_conv(rng));
  LayerKind current = LayerKind::kConv;
  while (static_cast<int>(block.layers.size()) < target) {
    auto row = limits.transitions.row(current);
    if (convs >= limits.max_convs) row[chain_index(LayerKind::kConv)] = 0.0;
    const LayerKind next = kChainKinds[rng.categorical(row)];
    if (next == LayerKind::kConv) {
      push_conv(random_conv(rng));
    } else if (is_pool(next)) {
      const int k = rng.uniform_int(2, 3);
      block.layers.push_back({next, k, k, 1.0});
    } else {
      block.layers.push_back(LayerSpec::unit(next));
    }
    current = next;
  }
  return block;
}

std::vector<std::string> block_violations(const Block& block, const BlockLimits& limits) {
  std::vector<std::string> out;
  if (block.layers.empty()) {
    out.emplace_back("block is empty");
    return out;
  }
  if (block.layers.front().kind != LayerKind::kConv) out.emplace_back("block must start with conv");
  if (static_cast<int>(block.layers.size()) > limits.max_layers) out.emplace_back("too many layers");
  const auto convs = std::count_if(block.layers.begin(), block.layers.end(),
                                   [](const LayerSpec& l) { return l.kind == LayerKind::kConv; });
  if (convs > limits.max_convs) out.emplace_back("too many convs");
  for (std::size_t i = 0; i < block.layers.size(); ++i) {
    if (block.layers[i].kind == LayerKind::kBatchNorm &&
        (i == 0 || block.layers[i - 1].kind != LayerKind::kConv)) {
      out.push_back("batch norm at " + std::to_string(i) + " does not follow a conv");
    }
  }
  return out;
}

void SkeletonConfig::validate() const {
  if (stages < 1) throw DataError("stages must be >= 1");
  if (blocks_per_stage < 1) throw DataError("blocks_per_stage must be >= 1");
  if (stem_channels < 1) throw DataError("stem_channels must be >= 1");
  if (input_channels < 1) throw DataError("input_channels must be >= 1");
  if (!(bn_probability >= 0.0 && bn_probability <= 1.0)) throw DataError("bn_probability must be in [0, 1]");
  if (epochs_T < 1) throw DataError("epochs_T must be >= 1");
}

BlockLimits SkeletonConfig::block_limits() const {
  BlockLimits limits;
  limits.bn_probability = bn_probability;
  return limits;
}

NetworkArch assemble_network(std::span<const Block> blocks, const SkeletonConfig& cfg) {
  if (blocks.empty()) throw DataError("assemble_network: no blocks");
  cfg.validate();
  for (const auto& block : blocks) {
    if (block.layers.empty()) throw DataError("assemble_network: empty block");
  }

  NetworkArch arch;
  arch.meta = {cfg.dataset_tag, cfg.blocks_per_stage, cfg.stem_channels, cfg.rng_seed};
  arch.layers.push_back(LayerSpec::conv(
      3, 3, snap_ratio(static_cast<double>(cfg.stem_channels) / cfg.input_channels)));
  int channels = cfg.stem_channels;

  std::vector<std::optional<int>> anchor(blocks.size());
  for (int stage = 0; stage < cfg.stages; ++stage) {
    const std::size_t which = static_cast<std::size_t>(stage) % blocks.size();
    for (int copy = 0; copy < cfg.blocks_per_stage; ++copy) {
      if (!anchor[which]) {
        anchor[which] = channels;
      } else if (*anchor[which] != channels) {
        // The adapter outputs exactly the expected count; its code carries
        // the quantized ratio.
        arch.layers.push_back(LayerSpec::conv(
            1, 1, snap_ratio(static_cast<double>(*anchor[which]) / channels)));
        channels = *anchor[which];
      }
      for (const auto& layer : blocks[which].layers) {
        arch.layers.push_back(layer);
        if (layer.kind == LayerKind::kConv) channels = scale_channels(channels, layer.channel_ratio);
      }
    }
    arch.layers.push_back(LayerSpec::max_pool(2));
  }
  return arch;
}

std::vector<NetworkArch> generate_archs(int count, const SkeletonConfig& cfg, int threads) {
  if (count < 1) throw DataError("generate_archs: count must be >= 1");
  cfg.validate();
  const BlockLimits limits = cfg.block_limits();
  std::vector<NetworkArch> out(static_cast<std::size_t>(count));

  auto build = [&](std::size_t i) {
    const std::uint64_t seed = child_seed(cfg.rng_seed, i);
    Rng rng(seed);
    const Block block = sample_block(rng, limits);
    NetworkArch arch = assemble_network(std::span(&block, 1), cfg);
    arch.meta.seed = seed;
    out[i] = std::move(arch);
  };

  const auto workers = static_cast<std::size_t>(std::clamp(threads, 1, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < out.size(); ++i) build(i);
    return out;
  }
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < out.size(); i += workers) build(i);
    });
  }
  pool.clear();
  return out;
}

}  // namespace peephole

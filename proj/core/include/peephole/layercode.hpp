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

#ifndef PEEPHOLE_LAYERCODE_HPP_
#define PEEPHOLE_LAYERCODE_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace peephole {

/// Layer types representable in the code space. The enumerator values are the
/// type ids (TY) of the encoding.
enum class LayerKind : int {
  kConv = 1,
  kMaxPool = 2,
  kAvgPool = 3,
  kReLU = 4,
  kSigmoid = 5,
  kTanh = 6,
  kBatchNorm = 7,
};

inline constexpr int kNumLayerKinds = 7;
inline constexpr int kMaxKernel = 5;
inline constexpr int kNumChannelBins = 8;
/// Bin whose center is ratio 1.0.
inline constexpr int kUnitChannelBin = 4;

/// Bin centers of the channel-ratio quantizer, in bin order (bin 1 first).
inline constexpr std::array<double, kNumChannelBins> kChannelBinCenters = {
    0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 2.5, 3.0};

/// Lowercase name used in architecture files ("conv", "maxpool", ..., "bn").
std::string_view kind_name(LayerKind kind);
/// Inverse of kind_name; throws DataError on unknown names.
LayerKind kind_from_name(std::string_view name);

bool is_pool(LayerKind kind);
bool is_activation(LayerKind kind);

/// Semantic description of one layer.
struct LayerSpec {
  LayerKind kind = LayerKind::kReLU;
  int kernel_w = 1;
  int kernel_h = 1;
  /// Output channels divided by input channels.
  double channel_ratio = 1.0;

  static LayerSpec conv(int kw, int kh, double ratio) { return {LayerKind::kConv, kw, kh, ratio}; }
  static LayerSpec max_pool(int k) { return {LayerKind::kMaxPool, k, k, 1.0}; }
  static LayerSpec avg_pool(int k) { return {LayerKind::kAvgPool, k, k, 1.0}; }
  static LayerSpec unit(LayerKind kind) { return {kind, 1, 1, 1.0}; }

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

/// The four-integer code (TY, KW, KH, CH) of a layer.
struct LayerCode {
  int ty = 0;
  int kw = 0;
  int kh = 0;
  int ch = 0;

  friend bool operator==(const LayerCode&, const LayerCode&) = default;
};

struct ArchMeta {
  std::string dataset_tag = "synthetic";
  int blocks_per_stage = 0;
  int stem_channels = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const ArchMeta&, const ArchMeta&) = default;
};

/// A sequential network up to (not including) its classifier.
struct NetworkArch {
  std::vector<LayerSpec> layers;
  ArchMeta meta;

  friend bool operator==(const NetworkArch&, const NetworkArch&) = default;
};

/// 1-based index of the nearest bin center after clamping to [0.25, 3.0].
/// Exact midpoints go to the lower bin. Throws DataError unless r is finite
/// and positive.
int quantize_ratio(double r);

/// Bin center of `bin` (1..8). Throws DataError when out of range.
double dequantize_bin(int bin);

/// Throws DataError naming the first offending field.
LayerCode encode_layer(const LayerSpec& spec);
LayerSpec decode_layer(const LayerCode& code);

/// Encodes every layer in order. Throws DataError (prefixed with the layer
/// index) on the first invalid layer, or when the network is empty or does
/// not start with a convolution.
std::vector<LayerCode> encode_network(const NetworkArch& arch);

struct Violation {
  /// -1 for network-level violations.
  int layer_index = -1;
  std::string message;
};

/// Every invariant violation of `arch`; empty iff encode_network succeeds.
std::vector<Violation> validate_arch(const NetworkArch& arch);

std::string to_string(const LayerCode& code);
std::string to_string(const LayerSpec& spec);

}  // namespace peephole

#endif  // PEEPHOLE_LAYERCODE_HPP_

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

#include "peephole/layercode.hpp"

#include <cmath>
#include <sstream>

#include "peephole/errors.hpp"

namespace peephole {

namespace {

struct KernelRange {
  int lo;
  int hi;
};

KernelRange kernel_range(LayerKind kind) {
  if (kind == LayerKind::kConv) return {1, kMaxKernel};
  if (is_pool(kind)) return {2, kMaxKernel};
  return {1, 1};
}

bool valid_kind(int ty) { return ty >= 1 && ty <= kNumLayerKinds; }

// All field-level violations of a single layer, in field order.
std::vector<std::string> layer_violations(const LayerSpec& s) {
  std::vector<std::string> out;
  if (!valid_kind(static_cast<int>(s.kind))) {
    out.emplace_back("kind out of range");
    return out;
  }
  const auto range = kernel_range(s.kind);
  if (s.kernel_w < range.lo || s.kernel_w > range.hi) out.emplace_back("kernel_w out of range");
  if (s.kernel_h < range.lo || s.kernel_h > range.hi) out.emplace_back("kernel_h out of range");
  if (s.kind == LayerKind::kConv) {
    // Out-of-range conv ratios are clamped by the quantizer.
    if (!std::isfinite(s.channel_ratio) || s.channel_ratio <= 0.0) {
      out.emplace_back("channel_ratio must be positive and finite");
    }
  } else if (s.channel_ratio != 1.0) {
    out.emplace_back("channel_ratio must be 1.0 for " + std::string(kind_name(s.kind)));
  }
  return out;
}

}  // namespace

std::string_view kind_name(LayerKind kind) {
  switch (kind) {
    case LayerKind::kConv: return "conv";
    case LayerKind::kMaxPool: return "maxpool";
    case LayerKind::kAvgPool: return "avgpool";
    case LayerKind::kReLU: return "relu";
    case LayerKind::kSigmoid: return "sigmoid";
    case LayerKind::kTanh: return "tanh";
    case LayerKind::kBatchNorm: return "bn";
  }
  return "unknown";
}

LayerKind kind_from_name(std::string_view name) {
  for (int ty = 1; ty <= kNumLayerKinds; ++ty) {
    const auto kind = static_cast<LayerKind>(ty);
    if (kind_name(kind) == name) return kind;
  }
  throw DataError("unknown layer kind \"" + std::string(name) + "\"");
}

bool is_pool(LayerKind kind) { return kind == LayerKind::kMaxPool || kind == LayerKind::kAvgPool; }

bool is_activation(LayerKind kind) {
  return kind == LayerKind::kReLU || kind == LayerKind::kSigmoid || kind == LayerKind::kTanh;
}

int quantize_ratio(double r) {
  if (!std::isfinite(r) || r <= 0.0) {
    std::ostringstream msg;
    msg << "invalid channel ratio " << r;
    throw DataError(msg.str());
  }
  for (int b = 0; b + 1 < kNumChannelBins; ++b) {
    // Midpoints of adjacent centers are exact binary fractions.
    const double mid = 0.5 * (kChannelBinCenters[b] + kChannelBinCenters[b + 1]);
    if (r <= mid) return b + 1;
  }
  return kNumChannelBins;
}

double dequantize_bin(int bin) {
  if (bin < 1 || bin > kNumChannelBins) {
    throw DataError("invalid channel bin " + std::to_string(bin));
  }
  return kChannelBinCenters[bin - 1];
}

LayerCode encode_layer(const LayerSpec& spec) {
  const auto problems = layer_violations(spec);
  if (!problems.empty()) throw DataError("cannot encode layer: " + problems.front());
  const int ch = spec.kind == LayerKind::kConv ? quantize_ratio(spec.channel_ratio) : kUnitChannelBin;
  return {static_cast<int>(spec.kind), spec.kernel_w, spec.kernel_h, ch};
}

LayerSpec decode_layer(const LayerCode& code) {
  if (!valid_kind(code.ty)) throw DataError("cannot decode " + to_string(code) + ": ty out of range");
  const auto kind = static_cast<LayerKind>(code.ty);
  const auto range = kernel_range(kind);
  if (code.kw < range.lo || code.kw > range.hi) {
    throw DataError("cannot decode " + to_string(code) + ": kw out of range");
  }
  if (code.kh < range.lo || code.kh > range.hi) {
    throw DataError("cannot decode " + to_string(code) + ": kh out of range");
  }
  if (kind == LayerKind::kConv) {
    if (code.ch < 1 || code.ch > kNumChannelBins) {
      throw DataError("cannot decode " + to_string(code) + ": ch out of range");
    }
  } else if (code.ch != kUnitChannelBin) {
    throw DataError("cannot decode " + to_string(code) + ": ch must be 4 for non-conv layers");
  }
  return {kind, code.kw, code.kh, dequantize_bin(code.ch)};
}

std::vector<LayerCode> encode_network(const NetworkArch& arch) {
  if (arch.layers.empty()) throw DataError("cannot encode an empty network");
  if (arch.layers.front().kind != LayerKind::kConv) {
    throw DataError("layer 0: network must start with a conv layer");
  }
  std::vector<LayerCode> codes;
  codes.reserve(arch.layers.size());
  for (std::size_t i = 0; i < arch.layers.size(); ++i) {
    try {
      codes.push_back(encode_layer(arch.layers[i]));
    } catch (const DataError& e) {
      throw DataError("layer " + std::to_string(i) + ": " + e.what());
    }
  }
  return codes;
}

std::vector<Violation> validate_arch(const NetworkArch& arch) {
  std::vector<Violation> out;
  if (arch.layers.empty()) {
    out.push_back({-1, "network is empty"});
    return out;
  }
  if (arch.layers.front().kind != LayerKind::kConv) {
    out.push_back({0, "first layer must be conv"});
  }
  for (std::size_t i = 0; i < arch.layers.size(); ++i) {
    for (auto& message : layer_violations(arch.layers[i])) {
      out.push_back({static_cast<int>(i), std::move(message)});
    }
  }
  return out;
}

std::string to_string(const LayerCode& code) {
  std::ostringstream s;
  s << '(' << code.ty << ',' << code.kw << ',' << code.kh << ',' << code.ch << ')';
  return s.str();
}

std::string to_string(const LayerSpec& spec) {
  std::ostringstream s;
  s << kind_name(spec.kind);
  if (spec.kind == LayerKind::kConv || is_pool(spec.kind)) s << ' ' << spec.kernel_w << 'x' << spec.kernel_h;
  if (spec.kind == LayerKind::kConv) s << " r" << spec.channel_ratio;
  return s.str();
}

}  // namespace peephole

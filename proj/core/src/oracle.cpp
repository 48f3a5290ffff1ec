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

#include "peephole/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "peephole/errors.hpp"

namespace peephole {

OracleStats oracle_stats(const NetworkArch& arch) {
  const auto codes = encode_network(arch);
  OracleStats s;
  s.depth = static_cast<int>(codes.size());
  double area = 0.0;
  for (const auto& c : codes) {
    const auto kind = static_cast<LayerKind>(c.ty);
    if (kind == LayerKind::kConv) {
      ++s.n_conv;
      area += c.kw * c.kh;
      s.channel_expansion *= dequantize_bin(c.ch);
    } else if (kind == LayerKind::kBatchNorm) {
      ++s.n_bn;
    } else if (is_activation(kind)) {
      ++s.n_act;
    }
  }
  s.mean_kernel_area = area / s.n_conv;
  return s;
}

double oracle_level(const NetworkArch& arch) {
  const OracleStats s = oracle_stats(arch);
  const double bn_share = std::min(static_cast<double>(s.n_bn) / s.n_conv, 1.0);
  const double expansion = std::clamp(std::log2(s.channel_expansion), -2.0, 2.0);
  const double z = 0.4 * bn_share * (s.n_conv / 10.0) + 0.25 * expansion / 2.0 - 0.3 * s.depth / 30.0 +
                   0.2 * s.mean_kernel_area / 25.0 + 0.15 * static_cast<double>(s.n_act) / s.depth;
  return 0.5 + 0.35 * std::tanh(z);
}

double oracle_accuracy(const NetworkArch& arch, int t, int T) {
  if (T < 1 || t < 1 || t > T) {
    throw DataError("oracle: epoch " + std::to_string(t) + " outside [1, " + std::to_string(T) + "]");
  }
  return oracle_level(arch) * (1.0 - 0.6 * std::exp(-3.0 * t / T));
}

}  // namespace peephole

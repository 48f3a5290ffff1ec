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

#ifndef PEEPHOLE_ORACLE_HPP_
#define PEEPHOLE_ORACLE_HPP_

#include <functional>

#include "peephole/layercode.hpp"

namespace peephole {

/// Architecture statistics the synthetic oracle depends on. Counts range over
/// the full encoded sequence (stem, adapters and stage pools included).
struct OracleStats {
  int n_conv = 0;
  int n_bn = 0;
  int n_act = 0;
  int depth = 0;
  /// Mean kw * kh over convolutions.
  double mean_kernel_area = 0.0;
  /// Product of the dequantized conv ratios.
  double channel_expansion = 1.0;
};

OracleStats oracle_stats(const NetworkArch& arch);

/// Final-accuracy level s in (0.15, 0.85):
///   0.5 + 0.35 tanh(0.4 min(n_bn/n_conv, 1) n_conv/10
///                   + 0.25 clip(log2 rho, -2, 2) / 2
///                   - 0.3 depth/30 + 0.2 kbar/25 + 0.15 n_act/depth)
double oracle_level(const NetworkArch& arch);

/// Deterministic stand-in for a trained network's validation accuracy after
/// epoch t of T: s (1 - 0.6 exp(-3t/T)). Throws DataError unless 1 <= t <= T.
double oracle_accuracy(const NetworkArch& arch, int t, int T);

using AccuracyOracle = std::function<double(const NetworkArch&, int t, int T)>;

}  // namespace peephole

#endif  // PEEPHOLE_ORACLE_HPP_

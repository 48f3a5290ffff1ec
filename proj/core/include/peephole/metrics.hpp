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

#ifndef PEEPHOLE_METRICS_HPP_
#define PEEPHOLE_METRICS_HPP_

#include <cstdint>
#include <span>
#include <string>

namespace peephole {

/// Mean squared difference. Throws MetricError on empty or unequal inputs.
double mse(std::span<const double> pred, std::span<const double> actual);

/// Pair classification behind Kendall's tau.
struct PairCounts {
  std::int64_t concordant = 0;
  std::int64_t discordant = 0;
  /// Tied in pred but not in actual.
  std::int64_t tied_pred = 0;
  /// Tied in actual but not in pred.
  std::int64_t tied_actual = 0;
  /// Tied in both.
  std::int64_t tied_both = 0;

  friend bool operator==(const PairCounts&, const PairCounts&) = default;
};

/// O(n log n) pair counts (sort plus merge-sort inversion count).
PairCounts kendall_pair_counts(std::span<const double> pred, std::span<const double> actual);

/// (P - Q) / sqrt((P + Q + T_pred)(P + Q + T_actual)). Throws MetricError
/// when either factor is zero.
double tau_b(const PairCounts& counts);

/// Tie-aware Kendall's tau (tau-b). Throws MetricError for fewer than two
/// elements, unequal lengths, NaNs, or a list that is entirely tied.
double kendall_tau(std::span<const double> pred, std::span<const double> actual);

/// 1 - SS_res / SS_tot. Throws MetricError when `actual` has zero variance.
double r_squared(std::span<const double> pred, std::span<const double> actual);

struct Metrics {
  double mse = 0.0;
  double tau = 0.0;
  double r2 = 0.0;
  std::size_t n = 0;
};

Metrics compute_metrics(std::span<const double> pred, std::span<const double> actual);

/// {"mse": ..., "n": ..., "r2": ..., "tau": ...}
std::string metrics_to_json(const Metrics& m);

}  // namespace peephole

#endif  // PEEPHOLE_METRICS_HPP_

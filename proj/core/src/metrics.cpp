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

#include "peephole/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "json.hpp"
#include "peephole/errors.hpp"

namespace peephole {

namespace {

void check_pair(std::span<const double> pred, std::span<const double> actual, std::size_t min_size,
                const char* what) {
  if (pred.size() != actual.size()) throw MetricError(std::string(what) + ": length mismatch");
  if (pred.size() < min_size) {
    throw MetricError(std::string(what) + ": needs at least " + std::to_string(min_size) + " values");
  }
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (std::isnan(pred[i]) || std::isnan(actual[i])) throw MetricError(std::string(what) + ": NaN input");
  }
}

// Pairs within runs of equal values of a sorted sequence.
template <typename Equal>
std::int64_t tied_pairs(std::size_t n, Equal equal) {
  std::int64_t total = 0;
  std::size_t run = 1;
  for (std::size_t i = 1; i <= n; ++i) {
    if (i < n && equal(i - 1, i)) {
      ++run;
    } else {
      total += static_cast<std::int64_t>(run) * static_cast<std::int64_t>(run - 1) / 2;
      run = 1;
    }
  }
  return total;
}

// Sorts `v` ascending and returns the number of strict inversions.
std::int64_t merge_count(std::vector<double>& v, std::vector<double>& scratch, std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::int64_t swaps = merge_count(v, scratch, lo, mid) + merge_count(v, scratch, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      swaps += static_cast<std::int64_t>(mid - i);
      scratch[k++] = v[j++];
    } else {
      scratch[k++] = v[i++];
    }
  }
  while (i < mid) scratch[k++] = v[i++];
  while (j < hi) scratch[k++] = v[j++];
  std::copy(scratch.begin() + static_cast<std::ptrdiff_t>(lo), scratch.begin() + static_cast<std::ptrdiff_t>(hi),
            v.begin() + static_cast<std::ptrdiff_t>(lo));
  return swaps;
}

}  // namespace

double mse(std::span<const double> pred, std::span<const double> actual) {
  check_pair(pred, actual, 1, "mse");
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - actual[i];
    sum += d * d;
  }
  return sum / static_cast<double>(pred.size());
}

PairCounts kendall_pair_counts(std::span<const double> pred, std::span<const double> actual) {
  check_pair(pred, actual, 2, "kendall_tau");
  const std::size_t n = pred.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pred[a] < pred[b] || (pred[a] == pred[b] && actual[a] < actual[b]);
  });

  const std::int64_t tie_pred_all =
      tied_pairs(n, [&](std::size_t a, std::size_t b) { return pred[order[a]] == pred[order[b]]; });
  const std::int64_t tie_both = tied_pairs(n, [&](std::size_t a, std::size_t b) {
    return pred[order[a]] == pred[order[b]] && actual[order[a]] == actual[order[b]];
  });

  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = actual[order[i]];
  std::vector<double> scratch(n);
  const std::int64_t discordant = merge_count(ys, scratch, 0, n);
  const std::int64_t tie_actual_all = tied_pairs(n, [&](std::size_t a, std::size_t b) { return ys[a] == ys[b]; });

  const std::int64_t total = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;
  PairCounts c;
  c.discordant = discordant;
  c.tied_both = tie_both;
  c.tied_pred = tie_pred_all - tie_both;
  c.tied_actual = tie_actual_all - tie_both;
  c.concordant = total - tie_pred_all - tie_actual_all + tie_both - discordant;
  return c;
}

double tau_b(const PairCounts& c) {
  const std::int64_t with_pred_ties = c.concordant + c.discordant + c.tied_pred;
  const std::int64_t with_actual_ties = c.concordant + c.discordant + c.tied_actual;
  if (with_pred_ties == 0 || with_actual_ties == 0) throw MetricError("kendall_tau: undefined for an all-tied list");
  return static_cast<double>(c.concordant - c.discordant) /
         std::sqrt(static_cast<double>(with_pred_ties) * static_cast<double>(with_actual_ties));
}

double kendall_tau(std::span<const double> pred, std::span<const double> actual) {
  return tau_b(kendall_pair_counts(pred, actual));
}

double r_squared(std::span<const double> pred, std::span<const double> actual) {
  check_pair(pred, actual, 2, "r_squared");
  // Tested on the values: the rounded mean of equal values need not equal them.
  if (std::all_of(actual.begin(), actual.end(), [&](double a) { return a == actual[0]; })) {
    throw MetricError("r_squared: actual values have zero variance");
  }
  const double mean = std::accumulate(actual.begin(), actual.end(), 0.0) / static_cast<double>(actual.size());
  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    ss_res += (actual[i] - pred[i]) * (actual[i] - pred[i]);
    ss_tot += (actual[i] - mean) * (actual[i] - mean);
  }
  if (ss_tot == 0.0) throw MetricError("r_squared: actual values have zero variance");
  return 1.0 - ss_res / ss_tot;
}

Metrics compute_metrics(std::span<const double> pred, std::span<const double> actual) {
  return {mse(pred, actual), kendall_tau(pred, actual), r_squared(pred, actual), pred.size()};
}

std::string metrics_to_json(const Metrics& m) {
  const nlohmann::json j = {{"mse", m.mse}, {"tau", m.tau}, {"r2", m.r2}, {"n", m.n}};
  return j.dump();
}

}  // namespace peephole

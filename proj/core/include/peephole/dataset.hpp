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

#ifndef PEEPHOLE_DATASET_HPP_
#define PEEPHOLE_DATASET_HPP_

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "peephole/layercode.hpp"
#include "peephole/oracle.hpp"

namespace peephole {

inline constexpr const char* kSyntheticOracleTag = "synthetic-oracle-v1";

/// Provenance of a sample's labels.
struct TrainerMeta {
  std::string source = kSyntheticOracleTag;
  std::string lr_schedule = "0.1, x0.1 every 60 epochs";
  double momentum = 0.9;
  double weight_decay = 1e-4;

  friend bool operator==(const TrainerMeta&, const TrainerMeta&) = default;
};

/// An architecture and its learning curve (or just its final accuracy).
struct Sample {
  NetworkArch arch;
  /// Accuracy after epochs 1..T; empty when only final_accuracy is known.
  std::vector<double> curve;
  std::optional<double> final_accuracy;
  int T = 1;
  TrainerMeta trainer_meta;

  /// y(T), the only label the trainer reads.
  double final_target() const;

  /// Throws DataError when accuracies leave [0, 1], T < 1, or the curve
  /// length differs from T.
  void validate() const;

  friend bool operator==(const Sample&, const Sample&) = default;
};

/// Attaches the full curve oracle(arch, 1..T) to every architecture.
std::vector<Sample> label_dataset(std::span<const NetworkArch> archs, int T,
                                  const AccuracyOracle& oracle = oracle_accuracy, int threads = 1);

/// JSONL, one sample per line:
///   {"T": 60, "arch": {...}, "curve": [...], "trainer_meta": {...}}
/// with "final_accuracy" in place of (or alongside) "curve".
std::string sample_to_json(const Sample& sample);
Sample sample_from_json(std::string_view text);
void write_dataset(const std::filesystem::path& path, std::span<const Sample> samples);
std::vector<Sample> read_dataset(const std::filesystem::path& path);

}  // namespace peephole

#endif  // PEEPHOLE_DATASET_HPP_

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

#ifndef PEEPHOLE_CHECKPOINT_HPP_
#define PEEPHOLE_CHECKPOINT_HPP_

#include <filesystem>
#include <string>
#include <string_view>

#include "peephole/predictor.hpp"

namespace peephole {

/// Checkpoint JSON:
///   {"format_version": 1,
///    "hyper": {"T_max": 100, "bn_eps": 1e-05, "bn_momentum": 0.1, ...},
///    "tensors": {"embed.type": {"data": [...], "shape": [7, 10]}, ...}}
/// Keys are sorted and reals use shortest round-trip formatting, so saving
/// the same parameters always produces the same bytes and loading restores
/// every value bitwise.
std::string checkpoint_to_json(const PeepholeParams& params);
PeepholeParams checkpoint_from_json(std::string_view text);

void save_checkpoint(const PeepholeParams& params, const std::filesystem::path& path);
/// Throws DataError on malformed files, unsupported versions, missing or
/// unknown tensors and shapes that disagree with the stored hyperparameters.
PeepholeParams load_checkpoint(const std::filesystem::path& path);

}  // namespace peephole

#endif  // PEEPHOLE_CHECKPOINT_HPP_

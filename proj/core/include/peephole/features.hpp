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

#ifndef PEEPHOLE_FEATURES_HPP_
#define PEEPHOLE_FEATURES_HPP_

#include <filesystem>
#include <span>
#include <string>

#include "peephole/layercode.hpp"
#include "peephole/predictor.hpp"

namespace peephole {

/// CSV with header "id,f0,...,f{hidden-1}" and one row per architecture;
/// id is the architecture's position in `archs`.
std::string features_csv(const PeepholeParams& params, std::span<const NetworkArch> archs);
void export_features(const PeepholeParams& params, std::span<const NetworkArch> archs,
                     const std::filesystem::path& path);

}  // namespace peephole

#endif  // PEEPHOLE_FEATURES_HPP_

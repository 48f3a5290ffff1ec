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

#ifndef PEEPHOLE_ARCH_IO_HPP_
#define PEEPHOLE_ARCH_IO_HPP_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "peephole/layercode.hpp"

namespace peephole {

/// Architecture JSON:
///   {"layers": [{"kh": 3, "kind": "conv", "kw": 3, "ratio": 2.0}, ...],
///    "meta": {"blocks_per_stage": 2, "dataset_tag": "...", "seed": 7,
///             "stem_channels": 16}}
/// Keys are emitted in sorted order so output is byte-stable. The reader
/// rejects unknown kinds; "kw"/"kh" default to 1 and "ratio" to 1.0.
std::string arch_to_json(const NetworkArch& arch);
NetworkArch arch_from_json(std::string_view text);

NetworkArch read_arch_file(const std::filesystem::path& path);
void write_arch_file(const std::filesystem::path& path, const NetworkArch& arch);

/// One architecture per line. Lines that hold a dataset sample (an object
/// with an "arch" member) are accepted too, so a labeled dataset can be used
/// wherever an architecture pool is expected.
std::vector<NetworkArch> read_archs_jsonl(const std::filesystem::path& path);
void write_archs_jsonl(const std::filesystem::path& path, const std::vector<NetworkArch>& archs);

}  // namespace peephole

#endif  // PEEPHOLE_ARCH_IO_HPP_

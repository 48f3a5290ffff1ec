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

#include "peephole/arch_io.hpp"

#include <sstream>

#include "json_codec.hpp"

namespace peephole {
namespace detail {

Json arch_to_value(const NetworkArch& arch) {
  Json layers = Json::array();
  for (const auto& layer : arch.layers) {
    layers.push_back({{"kind", std::string(kind_name(layer.kind))},
                      {"kw", layer.kernel_w},
                      {"kh", layer.kernel_h},
                      {"ratio", layer.channel_ratio}});
  }
  Json meta = {{"dataset_tag", arch.meta.dataset_tag},
               {"blocks_per_stage", arch.meta.blocks_per_stage},
               {"stem_channels", arch.meta.stem_channels},
               {"seed", arch.meta.seed}};
  return {{"meta", std::move(meta)}, {"layers", std::move(layers)}};
}

NetworkArch arch_from_value(const Json& value) {
  if (!value.is_object()) throw DataError("architecture must be a JSON object");
  const auto layers = value.find("layers");
  if (layers == value.end() || !layers->is_array()) {
    throw DataError("architecture: missing \"layers\" array");
  }
  NetworkArch arch;
  for (std::size_t i = 0; i < layers->size(); ++i) {
    const auto& entry = (*layers)[i];
    const std::string where = "layer " + std::to_string(i);
    if (!entry.is_object()) throw DataError(where + ": must be an object");
    LayerSpec spec;
    spec.kind = kind_from_name(require<std::string>(entry, "kind", where));
    spec.kernel_w = entry.contains("kw") ? require<int>(entry, "kw", where) : 1;
    spec.kernel_h = entry.contains("kh") ? require<int>(entry, "kh", where) : 1;
    spec.channel_ratio = entry.contains("ratio") ? require<double>(entry, "ratio", where) : 1.0;
    arch.layers.push_back(spec);
  }
  if (const auto meta = value.find("meta"); meta != value.end()) {
    if (!meta->is_object()) throw DataError("architecture: \"meta\" must be an object");
    const std::string where = "architecture meta";
    if (meta->contains("dataset_tag")) arch.meta.dataset_tag = require<std::string>(*meta, "dataset_tag", where);
    if (meta->contains("blocks_per_stage")) arch.meta.blocks_per_stage = require<int>(*meta, "blocks_per_stage", where);
    if (meta->contains("stem_channels")) arch.meta.stem_channels = require<int>(*meta, "stem_channels", where);
    if (meta->contains("seed")) arch.meta.seed = require<std::uint64_t>(*meta, "seed", where);
  }
  return arch;
}

Json parse_json(std::string_view text, const std::string& context) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(context + ": " + e.what());
  }
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_for_read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

}  // namespace detail

std::string arch_to_json(const NetworkArch& arch) { return detail::arch_to_value(arch).dump(); }

NetworkArch arch_from_json(std::string_view text) {
  return detail::arch_from_value(detail::parse_json(text, "architecture"));
}

NetworkArch read_arch_file(const std::filesystem::path& path) {
  auto in = detail::open_for_read(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return arch_from_json(buffer.str());
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_arch_file(const std::filesystem::path& path, const NetworkArch& arch) {
  auto out = detail::open_for_write(path);
  out << arch_to_json(arch) << '\n';
  if (!out) throw DataError("write failed: " + path.string());
}

std::vector<NetworkArch> read_archs_jsonl(const std::filesystem::path& path) {
  auto in = detail::open_for_read(path);
  std::vector<NetworkArch> archs;
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    try {
      const auto value = detail::parse_json(line, where);
      const auto nested = value.is_object() ? value.find("arch") : value.end();
      archs.push_back(detail::arch_from_value(nested != value.end() ? *nested : value));
    } catch (const DataError& e) {
      const std::string what = e.what();
      throw DataError(what.starts_with(where) ? what : where + ": " + what);
    }
  }
  return archs;
}

void write_archs_jsonl(const std::filesystem::path& path, const std::vector<NetworkArch>& archs) {
  auto out = detail::open_for_write(path);
  for (const auto& arch : archs) out << arch_to_json(arch) << '\n';
  if (!out) throw DataError("write failed: " + path.string());
}

}  // namespace peephole

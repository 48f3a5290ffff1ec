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

// Private helpers shared by the JSON readers and writers.
#ifndef PEEPHOLE_SRC_JSON_CODEC_HPP_
#define PEEPHOLE_SRC_JSON_CODEC_HPP_

#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"
#include "peephole/errors.hpp"
#include "peephole/layercode.hpp"

namespace peephole::detail {

using Json = nlohmann::json;

Json arch_to_value(const NetworkArch& arch);
NetworkArch arch_from_value(const Json& value);

Json parse_json(std::string_view text, const std::string& context);

template <typename T>
T require(const Json& object, const char* key, const std::string& context) {
  const auto it = object.find(key);
  if (it == object.end()) throw DataError(context + ": missing \"" + key + "\"");
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw DataError(context + ": field \"" + key + "\" has the wrong type");
  }
}

std::ofstream open_for_write(const std::filesystem::path& path);
std::ifstream open_for_read(const std::filesystem::path& path);

}  // namespace peephole::detail

#endif  // PEEPHOLE_SRC_JSON_CODEC_HPP_

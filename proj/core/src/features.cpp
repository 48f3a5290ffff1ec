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

#include "peephole/features.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>

#include "peephole/errors.hpp"

namespace peephole {

namespace {

constexpr std::size_t kChunk = 64;

void append_real(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

}  // namespace

std::string features_csv(const PeepholeParams& params, std::span<const NetworkArch> archs) {
  std::string out = "id";
  for (int k = 0; k < params.hyper.hidden; ++k) out += ",f" + std::to_string(k);
  out += '\n';
  for (std::size_t start = 0; start < archs.size(); start += kChunk) {
    const std::size_t count = std::min(kChunk, archs.size() - start);
    std::vector<std::vector<LayerCode>> codes;
    for (std::size_t i = start; i < start + count; ++i) codes.push_back(encode_network(archs[i]));
    const auto features = structural_features(params, codes);
    for (std::size_t b = 0; b < count; ++b) {
      out += std::to_string(start + b);
      for (double v : features.row(b)) {
        out += ',';
        append_real(out, v);
      }
      out += '\n';
    }
  }
  return out;
}

void export_features(const PeepholeParams& params, std::span<const NetworkArch> archs,
                     const std::filesystem::path& path) {
  const std::string text = features_csv(params, archs);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw DataError("write failed: " + path.string());
}

}  // namespace peephole

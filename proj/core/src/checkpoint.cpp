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

#include "peephole/checkpoint.hpp"

#include <set>
#include <sstream>

#include "json_codec.hpp"

namespace peephole {

using detail::Json;

namespace {

Json hyper_to_value(const PeepholeHyper& h) {
  return {{"d_type", h.d_type},     {"d_kernel", h.d_kernel},     {"d_channel", h.d_channel},
          {"hidden", h.hidden},     {"epoch_dim", h.epoch_dim},   {"mlp_hidden", h.mlp_hidden},
          {"T_max", h.T_max},       {"max_sequence", h.max_sequence},
          {"bn_eps", nn::kBatchNormEps}, {"bn_momentum", nn::kBatchNormMomentum}};
}

PeepholeHyper hyper_from_value(const Json& v) {
  if (!v.is_object()) throw DataError("checkpoint: \"hyper\" must be an object");
  const std::string where = "checkpoint hyper";
  PeepholeHyper h;
  h.d_type = detail::require<int>(v, "d_type", where);
  h.d_kernel = detail::require<int>(v, "d_kernel", where);
  h.d_channel = detail::require<int>(v, "d_channel", where);
  h.hidden = detail::require<int>(v, "hidden", where);
  h.epoch_dim = detail::require<int>(v, "epoch_dim", where);
  h.mlp_hidden = detail::require<int>(v, "mlp_hidden", where);
  h.T_max = detail::require<int>(v, "T_max", where);
  h.max_sequence = detail::require<int>(v, "max_sequence", where);
  if (detail::require<double>(v, "bn_eps", where) != nn::kBatchNormEps ||
      detail::require<double>(v, "bn_momentum", where) != nn::kBatchNormMomentum) {
    throw DataError("checkpoint: batch-norm constants differ from this build");
  }
  try {
    h.validate();
  } catch (const DataError& e) {
    throw DataError(std::string("checkpoint: ") + e.what());
  }
  return h;
}

}  // namespace

std::string checkpoint_to_json(const PeepholeParams& params) {
  params.validate();
  Json tensors = Json::object();
  for (const auto& named : const_cast<PeepholeParams&>(params).all_tensors()) {
    tensors[named.name] = {{"shape", named.tensor->shape()}, {"data", named.tensor->values()}};
  }
  Json root = {{"format_version", kCheckpointFormatVersion},
               {"hyper", hyper_to_value(params.hyper)},
               {"tensors", std::move(tensors)}};
  return root.dump();
}

PeepholeParams checkpoint_from_json(std::string_view text) {
  const Json root = detail::parse_json(text, "checkpoint");
  if (!root.is_object()) throw DataError("checkpoint: root must be an object");
  const int version = detail::require<int>(root, "format_version", "checkpoint");
  if (version != kCheckpointFormatVersion) {
    throw DataError("checkpoint: unsupported format_version " + std::to_string(version));
  }
  const auto hyper_it = root.find("hyper");
  if (hyper_it == root.end()) throw DataError("checkpoint: missing \"hyper\"");
  PeepholeParams params = PeepholeParams::zeros(hyper_from_value(*hyper_it));

  const auto tensors_it = root.find("tensors");
  if (tensors_it == root.end() || !tensors_it->is_object()) throw DataError("checkpoint: missing \"tensors\"");
  const Json& tensors = *tensors_it;

  std::set<std::string> known;
  for (auto& named : params.all_tensors()) {
    known.insert(named.name);
    const auto it = tensors.find(named.name);
    if (it == tensors.end()) throw DataError("checkpoint: missing tensor " + named.name);
    const std::string where = "checkpoint tensor " + named.name;
    const auto shape = detail::require<std::vector<std::size_t>>(*it, "shape", where);
    if (shape != named.tensor->shape()) {
      throw DataError(where + ": shape mismatch, file has " + nn::shape_string(shape) + ", hyper implies " +
                      nn::shape_string(named.tensor->shape()));
    }
    auto data = detail::require<std::vector<double>>(*it, "data", where);
    if (data.size() != named.tensor->size()) throw DataError(where + ": data length does not match shape");
    *named.tensor = nn::Tensor(shape, std::move(data));
  }
  for (const auto& item : tensors.items()) {
    if (!known.contains(item.key())) throw DataError("checkpoint: unknown tensor " + item.key());
  }
  return params;
}

void save_checkpoint(const PeepholeParams& params, const std::filesystem::path& path) {
  const std::string text = checkpoint_to_json(params);
  auto out = detail::open_for_write(path);
  out << text << '\n';
  if (!out) throw DataError("write failed: " + path.string());
}

PeepholeParams load_checkpoint(const std::filesystem::path& path) {
  auto in = detail::open_for_read(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return checkpoint_from_json(buffer.str());
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace peephole

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

#include "peephole/dataset.hpp"

#include <algorithm>
#include <thread>

#include "json_codec.hpp"

namespace peephole {

using detail::Json;

namespace {

void check_accuracy(double a, const std::string& what) {
  if (!(a >= 0.0 && a <= 1.0)) throw DataError(what + " must lie in [0, 1]");
}

}  // namespace

double Sample::final_target() const {
  if (!curve.empty()) {
    if (curve.size() != static_cast<std::size_t>(T)) throw DataError("sample curve length differs from T");
    return curve.back();
  }
  if (!final_accuracy) throw DataError("sample has neither a curve nor a final accuracy");
  return *final_accuracy;
}

void Sample::validate() const {
  if (T < 1) throw DataError("sample T must be >= 1");
  if (curve.empty() && !final_accuracy) throw DataError("sample has neither a curve nor a final accuracy");
  if (!curve.empty() && curve.size() != static_cast<std::size_t>(T)) {
    throw DataError("sample curve has " + std::to_string(curve.size()) + " entries but T = " + std::to_string(T));
  }
  for (double a : curve) check_accuracy(a, "curve accuracy");
  if (final_accuracy) check_accuracy(*final_accuracy, "final_accuracy");
  if (!curve.empty() && final_accuracy && *final_accuracy != curve.back()) {
    throw DataError("final_accuracy disagrees with the last curve entry");
  }
  encode_network(arch);
}

std::vector<Sample> label_dataset(std::span<const NetworkArch> archs, int T, const AccuracyOracle& oracle,
                                  int threads) {
  if (T < 1) throw DataError("label_dataset: T must be >= 1");
  std::vector<Sample> out(archs.size());
  auto label = [&](std::size_t i) {
    Sample s;
    s.arch = archs[i];
    s.T = T;
    s.curve.resize(static_cast<std::size_t>(T));
    for (int t = 1; t <= T; ++t) s.curve[static_cast<std::size_t>(t - 1)] = oracle(archs[i], t, T);
    out[i] = std::move(s);
  };
  const std::size_t workers =
      std::min(static_cast<std::size_t>(std::max(threads, 1)), std::max<std::size_t>(archs.size(), 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < archs.size(); ++i) label(i);
    return out;
  }
  // Surface the first failure from any worker on the calling thread.
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < archs.size(); i += workers) label(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::string sample_to_json(const Sample& sample) {
  Json meta = {{"source", sample.trainer_meta.source},
               {"lr_schedule", sample.trainer_meta.lr_schedule},
               {"momentum", sample.trainer_meta.momentum},
               {"weight_decay", sample.trainer_meta.weight_decay}};
  Json root = {{"arch", detail::arch_to_value(sample.arch)}, {"T", sample.T}, {"trainer_meta", std::move(meta)}};
  if (!sample.curve.empty()) root["curve"] = sample.curve;
  if (sample.final_accuracy) root["final_accuracy"] = *sample.final_accuracy;
  return root.dump();
}

Sample sample_from_json(std::string_view text) {
  const Json root = detail::parse_json(text, "sample");
  if (!root.is_object()) throw DataError("sample must be a JSON object");
  const std::string where = "sample";
  Sample s;
  const auto arch = root.find("arch");
  if (arch == root.end()) throw DataError("sample: missing \"arch\"");
  s.arch = detail::arch_from_value(*arch);
  s.T = detail::require<int>(root, "T", where);
  if (root.contains("curve")) s.curve = detail::require<std::vector<double>>(root, "curve", where);
  if (root.contains("final_accuracy")) s.final_accuracy = detail::require<double>(root, "final_accuracy", where);
  if (const auto meta = root.find("trainer_meta"); meta != root.end()) {
    if (!meta->is_object()) throw DataError("sample: \"trainer_meta\" must be an object");
    const std::string mw = "sample trainer_meta";
    s.trainer_meta.source = meta->contains("source") ? detail::require<std::string>(*meta, "source", mw) : "";
    s.trainer_meta.lr_schedule = detail::require<std::string>(*meta, "lr_schedule", mw);
    s.trainer_meta.momentum = detail::require<double>(*meta, "momentum", mw);
    s.trainer_meta.weight_decay = detail::require<double>(*meta, "weight_decay", mw);
  }
  s.validate();
  return s;
}

void write_dataset(const std::filesystem::path& path, std::span<const Sample> samples) {
  auto out = detail::open_for_write(path);
  for (const auto& s : samples) out << sample_to_json(s) << '\n';
  if (!out) throw DataError("write failed: " + path.string());
}

std::vector<Sample> read_dataset(const std::filesystem::path& path) {
  auto in = detail::open_for_read(path);
  std::vector<Sample> samples;
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      samples.push_back(sample_from_json(line));
    } catch (const DataError& e) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return samples;
}

}  // namespace peephole

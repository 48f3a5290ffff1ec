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

#include "peephole/model_check.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

#include "peephole/errors.hpp"
#include "peephole/rng.hpp"

namespace peephole {

std::vector<LayerCode> random_codes(Rng& rng, int length) {
  std::vector<LayerCode> codes;
  codes.reserve(static_cast<std::size_t>(length));
  for (int k = 0; k < length; ++k) {
    const auto kind = static_cast<LayerKind>(rng.uniform_int(1, kNumLayerKinds));
    LayerSpec spec = LayerSpec::unit(kind);
    if (kind == LayerKind::kConv) {
      spec = LayerSpec::conv(rng.uniform_int(1, kMaxKernel), rng.uniform_int(1, kMaxKernel),
                             dequantize_bin(rng.uniform_int(1, kNumChannelBins)));
    } else if (is_pool(kind)) {
      spec = {kind, rng.uniform_int(2, kMaxKernel), rng.uniform_int(2, kMaxKernel), 1.0};
    }
    codes.push_back(encode_layer(spec));
  }
  return codes;
}

namespace {

std::vector<std::size_t> pick_indices(Rng& rng, std::size_t size, std::size_t wanted) {
  std::vector<std::size_t> idx(size);
  std::iota(idx.begin(), idx.end(), 0);
  if (wanted == 0 || wanted >= size) return idx;
  rng.shuffle(std::span(idx));
  idx.resize(wanted);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace

ModelGradCheckCase model_grad_check_case(const ModelGradCheckConfig& config, int length, std::uint64_t seed) {
  if (config.batch < 2) throw Error("model grad check needs a batch of at least 2");
  Rng rng(child_seed(seed, 0));
  PeepholeParams params = init_params(child_seed(seed, 1), config.hyper);

  std::vector<std::vector<LayerCode>> sequences;
  std::vector<Example> batch;
  for (int b = 0; b < config.batch; ++b) sequences.push_back(random_codes(rng, length));
  for (int b = 0; b < config.batch; ++b) {
    batch.push_back({sequences[static_cast<std::size_t>(b)], rng.uniform_int(1, config.hyper.T_max), 0.5});
  }
  // Targets sit near the predictions: a small loss keeps the finite-difference
  // noise floor well below the tolerance for gradients that are exactly zero
  // (biases feeding a batch norm).
  const auto start = loss_and_grad(params, batch, nullptr).predictions;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    batch[b].target = std::clamp(start[b] + rng.uniform(-0.05, 0.05), 0.01, 0.99);
  }

  PeepholeParams grads = PeepholeParams::zeros(config.hyper);
  loss_and_grad(params, batch, &grads);
  auto loss = [&] { return loss_and_grad(params, batch, nullptr).loss; };

  auto values = params.trainable();
  auto analytic = grads.trainable();
  std::vector<std::vector<double>> scaled;
  std::vector<nn::GradCheckTarget> targets, corrupted;
  for (std::size_t k = 0; k < values.size(); ++k) {
    const auto& g = analytic[k].tensor->values();
    scaled.emplace_back(g.begin(), g.end());
    for (double& v : scaled.back()) v *= config.corruption;
  }
  for (std::size_t k = 0; k < values.size(); ++k) {
    auto idx = pick_indices(rng, values[k].tensor->size(), config.samples_per_tensor);
    targets.push_back({values[k].name, values[k].tensor->data(), analytic[k].tensor->values(), idx});
    corrupted.push_back({values[k].name, values[k].tensor->data(), scaled[k], std::move(idx)});
  }

  ModelGradCheckCase out;
  out.length = length;
  out.seed = seed;
  out.exact = nn::grad_check(loss, targets, config.eps);
  out.corrupted = nn::grad_check(loss, corrupted, config.eps);
  return out;
}

std::vector<ModelGradCheckCase> model_grad_check(const ModelGradCheckConfig& config) {
  std::vector<ModelGradCheckCase> out;
  for (int length : config.lengths) {
    for (std::uint64_t seed : config.seeds) out.push_back(model_grad_check_case(config, length, seed));
  }
  return out;
}

std::string to_string(const ModelGradCheckCase& c) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "length=%d seed=%llu checked=%zu max_rel=%.3e (%s[%zu]) corrupted=%.3e", c.length,
                static_cast<unsigned long long>(c.seed), c.exact.checked, c.exact.max_rel_error,
                c.exact.worst_name.c_str(), c.exact.worst_index, c.corrupted.max_rel_error);
  return buf;
}

}  // namespace peephole

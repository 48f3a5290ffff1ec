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

#include "peephole/optimizer.hpp"

#include "peephole/errors.hpp"

namespace peephole::nn {

OptState OptState::for_params(const std::vector<Tensor*>& params, const SgdConfig& config) {
  OptState state{config, {}};
  state.velocity.reserve(params.size());
  for (const Tensor* p : params) state.velocity.push_back(Tensor::zeros_like(*p));
  return state;
}

void sgd_step(const std::vector<Tensor*>& params, const std::vector<const Tensor*>& grads, OptState& state) {
  if (params.size() != grads.size() || params.size() != state.velocity.size()) {
    throw DimensionError("sgd_step: " + std::to_string(params.size()) + " params, " +
                         std::to_string(grads.size()) + " grads, " + std::to_string(state.velocity.size()) +
                         " momentum buffers");
  }
  const auto& cfg = state.config;
  for (std::size_t k = 0; k < params.size(); ++k) {
    Tensor& param = *params[k];
    const Tensor& grad = *grads[k];
    Tensor& v = state.velocity[k];
    require_shape(grad, param.shape(), "sgd_step grad");
    require_shape(v, param.shape(), "sgd_step momentum buffer");
    for (std::size_t i = 0; i < param.size(); ++i) {
      v[i] = cfg.momentum * v[i] + grad[i] + cfg.weight_decay * param[i];
      param[i] -= cfg.lr * v[i];
    }
  }
}

}  // namespace peephole::nn

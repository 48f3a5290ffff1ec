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

#ifndef PEEPHOLE_OPTIMIZER_HPP_
#define PEEPHOLE_OPTIMIZER_HPP_

#include <vector>

#include "peephole/tensor.hpp"

namespace peephole::nn {

struct SgdConfig {
  double lr = 0.01;
  double momentum = 0.9;
  double weight_decay = 1e-4;
};

/// Momentum buffers, one per parameter tensor in registration order.
struct OptState {
  SgdConfig config;
  std::vector<Tensor> velocity;

  static OptState for_params(const std::vector<Tensor*>& params, const SgdConfig& config);
};

/// v <- momentum * v + grad + weight_decay * param; param <- param - lr * v.
/// Throws DimensionError when params, grads and buffers disagree.
void sgd_step(const std::vector<Tensor*>& params, const std::vector<const Tensor*>& grads, OptState& state);

}  // namespace peephole::nn

#endif  // PEEPHOLE_OPTIMIZER_HPP_

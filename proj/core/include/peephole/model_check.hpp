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

#ifndef PEEPHOLE_MODEL_CHECK_HPP_
#define PEEPHOLE_MODEL_CHECK_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "peephole/gradcheck.hpp"
#include "peephole/predictor.hpp"
#include "peephole/rng.hpp"

namespace peephole {

/// Finite-difference check of loss_and_grad over every trainable tensor.
struct ModelGradCheckConfig {
  std::vector<int> lengths = {1, 5, 30};
  std::vector<std::uint64_t> seeds = {1, 2, 3};
  double eps = 1e-5;
  int batch = 3;
  /// Coordinates probed per tensor; 0 probes all of them.
  std::size_t samples_per_tensor = 12;
  /// Scale applied to the analytic gradient for the sensitivity control.
  double corruption = 1.01;
  PeepholeHyper hyper;
};

struct ModelGradCheckCase {
  int length = 0;
  std::uint64_t seed = 0;
  nn::GradCheckReport exact;
  nn::GradCheckReport corrupted;
};

/// Random valid codes; conv and pool kernels and conv bins are uniform.
std::vector<LayerCode> random_codes(Rng& rng, int length);

ModelGradCheckCase model_grad_check_case(const ModelGradCheckConfig& config, int length, std::uint64_t seed);
std::vector<ModelGradCheckCase> model_grad_check(const ModelGradCheckConfig& config);

std::string to_string(const ModelGradCheckCase& c);

}  // namespace peephole

#endif  // PEEPHOLE_MODEL_CHECK_HPP_

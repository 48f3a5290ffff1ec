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

#ifndef PEEPHOLE_OPS_HPP_
#define PEEPHOLE_OPS_HPP_

#include <cmath>
#include <span>
#include <vector>

#include "peephole/tensor.hpp"

namespace peephole::nn {

inline constexpr double kBatchNormEps = 1e-5;
inline constexpr double kBatchNormMomentum = 0.1;

inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

/// tanh through a single exp; absolute error within a few ulps of 1.
inline double fast_tanh(double x) {
  const double e = std::exp(-2.0 * std::fabs(x));
  return std::copysign((1.0 - e) / (1.0 + e), x);
}

/// W x + b for a single vector; W is [out x in].
std::vector<double> affine(std::span<const double> x, const Tensor& weight, std::span<const double> bias);

/// Row-wise affine map: X [batch x in] -> [batch x out].
Tensor affine_forward(const Tensor& x, const Tensor& weight, const Tensor& bias);

/// Accumulates parameter gradients into d_weight and d_bias. When `d_x` is
/// non-null it is overwritten with the input gradient.
void affine_backward(const Tensor& x, const Tensor& weight, const Tensor& d_out, Tensor& d_weight,
                     Tensor& d_bias, Tensor* d_x);

enum class Mode { kTrain, kInfer };

struct BatchNormParams {
  Tensor gamma;
  Tensor beta;
  Tensor running_mean;
  Tensor running_var;

  static BatchNormParams identity(std::size_t features);
};

/// Statistics of one training-mode forward pass, kept for the backward pass
/// and for the running-statistics update.
struct BatchNormCache {
  Tensor normalized;
  std::vector<double> mean;
  /// Biased (population) variance of the batch.
  std::vector<double> variance;
  std::vector<double> inv_std;
};

/// Per-feature batch normalization. Training mode normalizes by batch
/// statistics and folds them into the running statistics (momentum 0.1,
/// unbiased variance); inference mode normalizes by the running statistics.
/// Throws DimensionError for a training batch smaller than 2.
Tensor batchnorm(const Tensor& x, BatchNormParams& params, Mode mode);

/// Training-mode forward that leaves the running statistics alone.
Tensor batchnorm_train(const Tensor& x, const Tensor& gamma, const Tensor& beta, BatchNormCache& cache);
Tensor batchnorm_infer(const Tensor& x, const BatchNormParams& params);
void update_running_stats(BatchNormParams& params, const BatchNormCache& cache, std::size_t batch);

/// Accumulates into d_gamma and d_beta; overwrites d_x.
void batchnorm_backward(const Tensor& d_out, const Tensor& gamma, const BatchNormCache& cache,
                        Tensor& d_gamma, Tensor& d_beta, Tensor& d_x);

Tensor relu(const Tensor& x);
/// Gradient through relu given its input.
Tensor relu_backward(const Tensor& x, const Tensor& d_out);

/// 0.5 d^2 for |d| < 1, |d| - 0.5 otherwise, where d = pred - target.
double smooth_l1(double pred, double target);
/// Derivative of smooth_l1 with respect to pred.
double smooth_l1_grad(double pred, double target);

}  // namespace peephole::nn

#endif  // PEEPHOLE_OPS_HPP_

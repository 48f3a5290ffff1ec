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

#include "peephole/ops.hpp"

#include <cmath>

#include "kernels.hpp"
#include "peephole/errors.hpp"

namespace peephole::nn {

std::vector<double> affine(std::span<const double> x, const Tensor& weight, std::span<const double> bias) {
  if (weight.rank() != 2 || weight.cols() != x.size() || weight.rows() != bias.size()) {
    throw DimensionError("affine: weight " + shape_string(weight.shape()) + " incompatible with input " +
                         std::to_string(x.size()) + " and bias " + std::to_string(bias.size()));
  }
  std::vector<double> y(weight.rows());
  for (std::size_t r = 0; r < y.size(); ++r) {
    y[r] = bias[r] + kernels::dot(weight.row(r).data(), x.data(), x.size());
  }
  return y;
}

Tensor affine_forward(const Tensor& x, const Tensor& weight, const Tensor& bias) {
  if (weight.rank() != 2 || x.cols() != weight.cols() || bias.size() != weight.rows()) {
    throw DimensionError("affine_forward: input " + shape_string(x.shape()) + ", weight " +
                         shape_string(weight.shape()) + ", bias " + shape_string(bias.shape()));
  }
  const std::size_t batch = x.rows();
  const std::size_t in = weight.cols();
  const std::size_t out = weight.rows();
  Tensor y({batch, out});
  for (std::size_t r = 0; r < out; ++r) {
    const double* w = weight.row(r).data();
    for (std::size_t b = 0; b < batch; ++b) {
      y.at(b, r) = bias[r] + kernels::dot(w, x.row(b).data(), in);
    }
  }
  return y;
}

void affine_backward(const Tensor& x, const Tensor& weight, const Tensor& d_out, Tensor& d_weight,
                     Tensor& d_bias, Tensor* d_x) {
  const std::size_t batch = x.rows();
  const std::size_t in = weight.cols();
  const std::size_t out = weight.rows();
  require_shape(d_out, {batch, out}, "affine_backward d_out");
  require_shape(d_weight, weight.shape(), "affine_backward d_weight");
  require_shape(d_bias, {out}, "affine_backward d_bias");
  if (d_x) *d_x = Tensor({batch, in});
  for (std::size_t r = 0; r < out; ++r) {
    double* dw = d_weight.row(r).data();
    const double* w = weight.row(r).data();
    for (std::size_t b = 0; b < batch; ++b) {
      const double g = d_out.at(b, r);
      d_bias[r] += g;
      kernels::axpy(g, x.row(b).data(), dw, in);
      if (d_x) kernels::axpy(g, w, d_x->row(b).data(), in);
    }
  }
}

BatchNormParams BatchNormParams::identity(std::size_t features) {
  return {Tensor({features}, 1.0), Tensor({features}, 0.0), Tensor({features}, 0.0), Tensor({features}, 1.0)};
}

Tensor batchnorm_train(const Tensor& x, const Tensor& gamma, const Tensor& beta, BatchNormCache& cache) {
  const std::size_t batch = x.rows();
  const std::size_t features = x.cols();
  if (batch < 2) throw DimensionError("batchnorm: training mode needs a batch of at least 2");
  require_shape(gamma, {features}, "batchnorm gamma");
  require_shape(beta, {features}, "batchnorm beta");

  cache.mean.assign(features, 0.0);
  cache.variance.assign(features, 0.0);
  cache.inv_std.assign(features, 0.0);
  cache.normalized = Tensor({batch, features});
  Tensor y({batch, features});
  const double n = static_cast<double>(batch);
  for (std::size_t f = 0; f < features; ++f) {
    double sum = 0.0;
    for (std::size_t b = 0; b < batch; ++b) sum += x.at(b, f);
    const double mean = sum / n;
    double sq = 0.0;
    for (std::size_t b = 0; b < batch; ++b) {
      const double d = x.at(b, f) - mean;
      sq += d * d;
    }
    const double var = sq / n;
    const double inv_std = 1.0 / std::sqrt(var + kBatchNormEps);
    cache.mean[f] = mean;
    cache.variance[f] = var;
    cache.inv_std[f] = inv_std;
    for (std::size_t b = 0; b < batch; ++b) {
      const double xhat = (x.at(b, f) - mean) * inv_std;
      cache.normalized.at(b, f) = xhat;
      y.at(b, f) = gamma[f] * xhat + beta[f];
    }
  }
  return y;
}

Tensor batchnorm_infer(const Tensor& x, const BatchNormParams& params) {
  const std::size_t features = x.cols();
  require_shape(params.running_mean, {features}, "batchnorm running_mean");
  require_shape(params.running_var, {features}, "batchnorm running_var");
  require_shape(params.gamma, {features}, "batchnorm gamma");
  require_shape(params.beta, {features}, "batchnorm beta");
  Tensor y({x.rows(), features});
  for (std::size_t f = 0; f < features; ++f) {
    const double inv_std = 1.0 / std::sqrt(params.running_var[f] + kBatchNormEps);
    for (std::size_t b = 0; b < x.rows(); ++b) {
      y.at(b, f) = params.gamma[f] * ((x.at(b, f) - params.running_mean[f]) * inv_std) + params.beta[f];
    }
  }
  return y;
}

void update_running_stats(BatchNormParams& params, const BatchNormCache& cache, std::size_t batch) {
  const double unbias = static_cast<double>(batch) / static_cast<double>(batch - 1);
  for (std::size_t f = 0; f < cache.mean.size(); ++f) {
    params.running_mean[f] = (1.0 - kBatchNormMomentum) * params.running_mean[f] + kBatchNormMomentum * cache.mean[f];
    params.running_var[f] =
        (1.0 - kBatchNormMomentum) * params.running_var[f] + kBatchNormMomentum * cache.variance[f] * unbias;
  }
}

Tensor batchnorm(const Tensor& x, BatchNormParams& params, Mode mode) {
  if (mode == Mode::kInfer) return batchnorm_infer(x, params);
  BatchNormCache cache;
  Tensor y = batchnorm_train(x, params.gamma, params.beta, cache);
  update_running_stats(params, cache, x.rows());
  return y;
}

void batchnorm_backward(const Tensor& d_out, const Tensor& gamma, const BatchNormCache& cache,
                        Tensor& d_gamma, Tensor& d_beta, Tensor& d_x) {
  const std::size_t batch = d_out.rows();
  const std::size_t features = d_out.cols();
  require_shape(cache.normalized, d_out.shape(), "batchnorm_backward cache");
  d_x = Tensor({batch, features});
  const double n = static_cast<double>(batch);
  for (std::size_t f = 0; f < features; ++f) {
    double sum_dy = 0.0;
    double sum_dy_xhat = 0.0;
    for (std::size_t b = 0; b < batch; ++b) {
      sum_dy += d_out.at(b, f);
      sum_dy_xhat += d_out.at(b, f) * cache.normalized.at(b, f);
    }
    d_beta[f] += sum_dy;
    d_gamma[f] += sum_dy_xhat;
    // dxhat = dy * gamma; dx = inv_std / n * (n dxhat - sum dxhat - xhat sum(dxhat xhat))
    const double scale = gamma[f] * cache.inv_std[f] / n;
    for (std::size_t b = 0; b < batch; ++b) {
      d_x.at(b, f) = scale * (n * d_out.at(b, f) - sum_dy - cache.normalized.at(b, f) * sum_dy_xhat);
    }
  }
}

Tensor relu(const Tensor& x) {
  Tensor y = x;
  for (double& v : y.data()) v = v > 0.0 ? v : 0.0;
  return y;
}

Tensor relu_backward(const Tensor& x, const Tensor& d_out) {
  Tensor d = d_out;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!(x[i] > 0.0)) d[i] = 0.0;
  }
  return d;
}

double smooth_l1(double pred, double target) {
  const double d = pred - target;
  const double a = std::abs(d);
  return a < 1.0 ? 0.5 * d * d : a - 0.5;
}

double smooth_l1_grad(double pred, double target) {
  const double d = pred - target;
  if (std::abs(d) < 1.0) return d;
  return d > 0.0 ? 1.0 : -1.0;
}

}  // namespace peephole::nn

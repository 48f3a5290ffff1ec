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

// Inner-product and update kernels shared by the dense layers and the LSTM.
//
// dot() accumulates in eight fixed lanes with fused multiply-adds and
// combines them in a fixed tree. The blocked variants perform exactly the
// same per-element operations in the same order, so every caller gets
// bitwise identical results whichever variant it uses and whatever vector
// width the compiler picks. std::fma is correctly rounded on every target.
#ifndef PEEPHOLE_SRC_KERNELS_HPP_
#define PEEPHOLE_SRC_KERNELS_HPP_

#include <cmath>
#include <cstddef>

namespace peephole::nn::kernels {

inline constexpr std::size_t kLanes = 8;

inline double reduce_lanes(const double* acc) {
  return ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7]));
}

inline double dot(const double* __restrict a, const double* __restrict b, std::size_t n) {
  double acc[kLanes] = {};
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
#pragma omp simd
    for (std::size_t k = 0; k < kLanes; ++k) acc[k] = std::fma(a[i + k], b[i + k], acc[k]);
  }
  for (std::size_t k = 0; i < n; ++i, ++k) acc[k] = std::fma(a[i], b[i], acc[k]);
  return reduce_lanes(acc);
}

/// out[j] = dot(row, x[j], n) for four vectors sharing one row.
inline void dot_x4(const double* __restrict row, const double* const x[4], std::size_t n, double out[4]) {
  double a0[kLanes] = {}, a1[kLanes] = {}, a2[kLanes] = {}, a3[kLanes] = {};
  const double* __restrict x0 = x[0];
  const double* __restrict x1 = x[1];
  const double* __restrict x2 = x[2];
  const double* __restrict x3 = x[3];
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
#pragma omp simd
    for (std::size_t k = 0; k < kLanes; ++k) {
      const double w = row[i + k];
      a0[k] = std::fma(w, x0[i + k], a0[k]);
      a1[k] = std::fma(w, x1[i + k], a1[k]);
      a2[k] = std::fma(w, x2[i + k], a2[k]);
      a3[k] = std::fma(w, x3[i + k], a3[k]);
    }
  }
  for (std::size_t k = 0; i < n; ++i, ++k) {
    a0[k] = std::fma(row[i], x0[i], a0[k]);
    a1[k] = std::fma(row[i], x1[i], a1[k]);
    a2[k] = std::fma(row[i], x2[i], a2[k]);
    a3[k] = std::fma(row[i], x3[i], a3[k]);
  }
  out[0] = reduce_lanes(a0);
  out[1] = reduce_lanes(a1);
  out[2] = reduce_lanes(a2);
  out[3] = reduce_lanes(a3);
}

/// y += alpha * x
inline void axpy(double alpha, const double* __restrict x, double* __restrict y, std::size_t n) {
#pragma omp simd
  for (std::size_t i = 0; i < n; ++i) y[i] = std::fma(alpha, x[i], y[i]);
}

/// Four axpy calls into the same y, applied in order 0..3.
inline void axpy_x4(const double alpha[4], const double* const x[4], double* __restrict y, std::size_t n) {
  const double* __restrict x0 = x[0];
  const double* __restrict x1 = x[1];
  const double* __restrict x2 = x[2];
  const double* __restrict x3 = x[3];
  const double c0 = alpha[0], c1 = alpha[1], c2 = alpha[2], c3 = alpha[3];
#pragma omp simd
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = std::fma(c3, x3[i], std::fma(c2, x2[i], std::fma(c1, x1[i], std::fma(c0, x0[i], y[i]))));
  }
}

}  // namespace peephole::nn::kernels

#endif  // PEEPHOLE_SRC_KERNELS_HPP_

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

#ifndef PEEPHOLE_TENSOR_HPP_
#define PEEPHOLE_TENSOR_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace peephole::nn {

/// Dense row-major array of doubles.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> shape, double fill = 0.0);
  /// Throws DimensionError if data.size() differs from the shape's product.
  Tensor(std::vector<std::size_t> shape, std::vector<double> data);

  static Tensor zeros_like(const Tensor& other) { return Tensor(other.shape_); }

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  /// Leading extent; 1 for rank 0.
  std::size_t rows() const { return shape_.empty() ? 1 : shape_.front(); }
  /// Product of the trailing extents.
  std::size_t cols() const { return cols_; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  const std::vector<double>& values() const { return data_; }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }
  double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return std::span(data_).subspan(r * cols_, cols()); }
  std::span<const double> row(std::size_t r) const { return std::span(data_).subspan(r * cols_, cols()); }

  void fill(double value);

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
  std::size_t cols_ = 0;
};

std::string shape_string(const std::vector<std::size_t>& shape);

/// Throws DimensionError naming `what` when the shapes differ.
void require_shape(const Tensor& t, const std::vector<std::size_t>& shape, const std::string& what);

}  // namespace peephole::nn

#endif  // PEEPHOLE_TENSOR_HPP_

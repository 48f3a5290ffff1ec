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

#ifndef PEEPHOLE_GRADCHECK_HPP_
#define PEEPHOLE_GRADCHECK_HPP_

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace peephole::nn {

/// A block of parameters to perturb and the analytic gradient claimed for it.
struct GradCheckTarget {
  std::string name;
  std::span<double> values;
  std::span<const double> analytic;
  /// Coordinates to check; empty means all of them.
  std::vector<std::size_t> indices;
};

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::string worst_name;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t checked = 0;
};

/// Compares each analytic partial against the central difference
/// (f(x + eps) - f(x - eps)) / (2 eps) and reports the largest
/// |a - n| / max(|a|, |n|, 1e-8). Each coordinate is restored after probing.
/// Throws NumericError if the loss is ever non-finite.
GradCheckReport grad_check(const std::function<double()>& loss, std::span<const GradCheckTarget> targets,
                           double eps);

}  // namespace peephole::nn

#endif  // PEEPHOLE_GRADCHECK_HPP_

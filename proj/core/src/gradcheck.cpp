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

#include "peephole/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "peephole/errors.hpp"

namespace peephole::nn {

namespace {

double checked(double value, const std::string& where) {
  if (!std::isfinite(value)) throw NumericError("grad_check: non-finite loss " + where);
  return value;
}

}  // namespace

GradCheckReport grad_check(const std::function<double()>& loss, std::span<const GradCheckTarget> targets,
                           double eps) {
  if (!(eps > 0.0)) throw NumericError("grad_check: eps must be positive");
  checked(loss(), "at the base point");

  GradCheckReport report;
  for (const auto& target : targets) {
    if (target.analytic.size() != target.values.size()) {
      throw DimensionError("grad_check: gradient of " + target.name + " has the wrong length");
    }
    auto probe = [&](std::size_t i) {
      if (i >= target.values.size()) throw DimensionError("grad_check: index out of range in " + target.name);
      double& x = target.values[i];
      const double saved = x;
      x = saved + eps;
      const double up = checked(loss(), "probing " + target.name);
      x = saved - eps;
      const double down = checked(loss(), "probing " + target.name);
      x = saved;
      const double numeric = (up - down) / (2.0 * eps);
      const double analytic = target.analytic[i];
      const double rel = std::abs(analytic - numeric) /
                         std::max({std::abs(analytic), std::abs(numeric), 1e-8});
      if (++report.checked == 1 || rel > report.max_rel_error) {
        report.max_rel_error = rel;
        report.worst_name = target.name;
        report.worst_index = i;
        report.worst_analytic = analytic;
        report.worst_numeric = numeric;
      }
    };
    if (target.indices.empty()) {
      for (std::size_t i = 0; i < target.values.size(); ++i) probe(i);
    } else {
      for (std::size_t i : target.indices) probe(i);
    }
  }
  return report;
}

}  // namespace peephole::nn

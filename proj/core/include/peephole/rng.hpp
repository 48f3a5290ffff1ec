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

#ifndef PEEPHOLE_RNG_HPP_
#define PEEPHOLE_RNG_HPP_

#include <cstdint>
#include <random>
#include <span>

namespace peephole {

/// splitmix64 finalizer; used to derive independent child seeds.
std::uint64_t mix64(std::uint64_t x);

/// Seed of item `index` in a stream rooted at `seed`. Pure function of both.
std::uint64_t child_seed(std::uint64_t seed, std::uint64_t index);

/// Pseudo-random source with a portable stream.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. Distributions are implemented here rather than taken from
/// <random> because the standard leaves their algorithms unspecified, and
/// every generated dataset and initialization must be byte-reproducible
/// across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer on the closed range [lo, hi].
  int uniform_int(int lo, int hi);

  /// Normal deviate (Box-Muller, one value per call).
  double normal(double mean, double stddev);

  bool bernoulli(double p) { return uniform() < p; }

  /// Index drawn proportionally to `weights`; zero-weight entries are never
  /// returned. Weights must be non-negative with a positive sum.
  std::size_t categorical(std::span<const double> weights);

  /// Fisher-Yates shuffle driven by uniform_int.
  template <typename T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform_int(0, static_cast<int>(i - 1)));
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace peephole

#endif  // PEEPHOLE_RNG_HPP_

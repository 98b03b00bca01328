// Copyright 2026 The gemtrack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GEM_RNG_HPP
#define GEM_RNG_HPP

#include <array>
#include <cstdint>
#include <span>

namespace gem {

// Portable random stream: xoshiro256++ seeded through splitmix64, with all
// derived draws (uniform, normal, categorical) implemented here rather than
// delegated to <random>, whose distributions differ between standard
// libraries. Identical (seed, stream) therefore reproduces the identical
// draw sequence on every platform.
//
// Stream derivation: splitmix64 is started at
//   seed + 0x9E3779B97F4A7C15 * (stream + 1)
// and its first four outputs become the xoshiro256++ state.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0);

  /// Next raw 64-bit word.
  std::uint64_t next();

  /// Uniform double in [0, 1), 53 significant bits.
  double uniform01();

  /// Uniform integer in [0, n), unbiased (rejection). n must be > 0.
  std::uint64_t below(std::uint64_t n);

  /// Standard normal draw (Marsaglia polar, a spare is cached).
  double normal();

  /// Index draw from nonnegative weights summing to ~1. Rounding shortfall
  /// falls through to the last index with positive weight.
  int categorical(std::span<const double> weights);

 private:
  std::array<std::uint64_t, 4> state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace gem

#endif  // GEM_RNG_HPP

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

#ifndef GEM_BELIEF_HPP
#define GEM_BELIEF_HPP

#include <cstddef>

#include "gem/linalg.hpp"

namespace gem {

/// Probability vector over the chain's state space.
struct Belief {
  Vec p;

  std::size_t size() const { return p.size(); }
  double operator[](std::size_t i) const { return p[i]; }

  static Belief uniform(std::size_t q) {
    return Belief{Vec(q, 1.0 / static_cast<double>(q))};
  }
  static Belief one_hot(std::size_t q, std::size_t i) {
    Belief b{Vec(q, 0.0)};
    b.p[i] = 1.0;
    return b;
  }

  int argmax() const {
    int best = 0;
    for (std::size_t i = 1; i < p.size(); ++i)
      if (p[i] > p[best]) best = static_cast<int>(i);
    return best;
  }

  /// Entries nonnegative and summing to 1 within tol.
  bool on_simplex(double tol = 1e-9) const;
};

}  // namespace gem

#endif  // GEM_BELIEF_HPP

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

#ifndef GEM_CHAIN_HPP
#define GEM_CHAIN_HPP

#include <vector>

#include "gem/belief.hpp"
#include "gem/linalg.hpp"
#include "gem/rng.hpp"

namespace gem {

/// State of the finite chain, stored as a plain index in [0, q). One-hot
/// vectors are materialized only at estimator/metric boundaries.
using StateIndex = int;

using ChainTrajectory = std::vector<StateIndex>;

// Row-stochastic transition matrix: entry (i, j) is the probability of
// moving to state j given current state i. This row convention is the one
// and only orientation stored anywhere in the project; transposition
// happens inside the operations that need the other direction.
class TransitionMatrix {
 public:
  /// Validates: square, q ≥ 1 (else EmptyMatrixError), entries ≥ 0 and
  /// rows summing to 1 within 1e-9 (else NonStochasticError).
  explicit TransitionMatrix(Mat rows);

  /// Divides each row by its sum instead of rejecting. Rows must have a
  /// positive sum.
  static TransitionMatrix normalized(Mat rows);

  /// Entries i.i.d. uniform(0,1), rows then normalized.
  static TransitionMatrix random(int q, RandomStream& rng);

  int q() const { return static_cast<int>(p_.rows()); }
  double operator()(int i, int j) const { return p_(i, j); }
  const Mat& rows() const { return p_; }
  const double* row(int i) const { return p_.row(i); }

  bool operator==(const TransitionMatrix&) const = default;

 private:
  struct Unchecked {};
  TransitionMatrix(Mat rows, Unchecked) : p_(std::move(rows)) {}
  Mat p_;
};

/// Draw the next state from the row of the current one.
StateIndex step_chain(const TransitionMatrix& p, StateIndex s,
                      RandomStream& rng);

ChainTrajectory simulate_chain(const TransitionMatrix& p, StateIndex s0,
                               int steps, RandomStream& rng);

/// Stationary distribution by power iteration (residual < 1e-10, cap 1e6
/// iterations). Runs from two different starting vectors; disagreement or
/// non-convergence raises NoConvergenceError, which is the signal for a
/// reducible or periodic chain.
Belief stationary_distribution(const TransitionMatrix& p);

}  // namespace gem

#endif  // GEM_CHAIN_HPP

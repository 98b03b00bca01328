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

#ifndef GEM_ESTIMATOR_HPP
#define GEM_ESTIMATOR_HPP

#include "gem/belief.hpp"
#include "gem/chain.hpp"
#include "gem/sensors.hpp"

namespace gem {

/// Euclidean projection onto {w ≥ 0, Σw = 1} by sort-and-threshold.
Belief project_to_simplex(const Vec& v);

/// diag(x) − x xᵀ, the error covariance of a one-hot draw from belief x.
Mat belief_cov(const Belief& x);

/// One-step prediction of the belief through the chain.
Belief predict(const TransitionMatrix& p, const Belief& prev);

/// Filter state: posterior and predicted beliefs with their error
/// covariance estimates.
struct EstimatorState {
  Belief belief;     // posterior at the current step
  Belief predicted;  // prior for the current step
  Mat cov_est;
  Mat cov_pred;
};

EstimatorState initial_estimator_state(const Belief& pi);

// One measurement-update cycle with observation dimension set by the
// activation vector:
//   predict; form the innovation covariance M Σ Mᵀ + Σᵢ x̂(i) Ψᵢ; gain
//   G = Σ Mᵀ (·)⁻¹; linear update; simplex projection; refresh covariances.
// An empty activation vector degenerates to the pure prediction step.
// Deterministic given its inputs. Throws SingularInnovationError when the
// innovation matrix cannot be factored even after adding 1e-9·I.
EstimatorState estimate_step(const EstimatorState& prev,
                             const TransitionMatrix& tpm,
                             const SubsetParams& sp, const ActivationVector& b,
                             const Observation& y);

}  // namespace gem

#endif  // GEM_ESTIMATOR_HPP

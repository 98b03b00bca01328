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

#ifndef GEM_ONLINE_EM_HPP
#define GEM_ONLINE_EM_HPP

#include <cstdint>
#include <vector>

#include "gem/belief.hpp"
#include "gem/chain.hpp"
#include "gem/scheduler.hpp"
#include "gem/sensors.hpp"

// Streaming EM for the hidden chain with vector observations whose
// dimension follows the activation vector. The transition-count statistic
// is a dense (i, j, k) array mixed every step. The observation-moment
// statistics cannot be kept in stacked form — the stack changes shape with
// the active set — so they are decomposed into per-sensor blocks indexed
// by (state counted, state conditioned on): every block is mixed through
// the retrospective kernel every step, while the innovation term (the new
// observation's moments) lands only on the sensors actually active, each
// on its own activation-count clock. The re-estimation step then
// reassembles exactly the active sensors' blocks, which keeps the ratios
// weighted averages of that sensor's own observations.

namespace gem {

/// Sufficient statistics of one sensor: for each (i, j) state pair, the
/// moment components [count | mean vector | second-moment matrix] flattened
/// to comps = 1 + dim + dim² doubles, c fastest.
struct SensorStats {
  int dim = 0;
  int comps = 0;
  Vec data;  // q·q·comps

  double* at(int i, int j, int q) { return data.data() + (i * q + j) * comps; }
  const double* at(int i, int j, int q) const {
    return data.data() + (i * q + j) * comps;
  }
};

struct EMState {
  Belief phi;                  // filter over states
  Vec rho_a;                   // q³ transition stats, (i, j, k), k fastest
  std::vector<SensorStats> sensor_stats;
  std::vector<std::int64_t> sensor_clock;  // activations seen per sensor

  int q() const { return static_cast<int>(phi.size()); }
  double rho_a_at(int i, int j, int k) const {
    const int n = q();
    return rho_a[(i * n + j) * n + k];
  }
};

/// Distribution over the previous state given each current state; stored
/// with the conditioned state as the row so that mixing reads contiguous
/// memory. by_current(j, i) = p(prev = i | current = j); rows sum to 1.
struct RetrospectiveKernel {
  Mat by_current;

  double operator()(int i, int j) const { return by_current(j, i); }
};

/// Log observation weight of a state: −½ (y−μ)ᵀ Ψ⁻¹ (y−μ), plus the
/// −½ log det(2πΨ) normalizer when `normalized` (the default everywhere;
/// without it, states with wide covariances are systematically favored).
/// Empty observations weigh 1 (log 0). Block structure is exploited; a
/// block that cannot be factored after jitter retries raises CholeskyError.
double log_gaussian_weight(const SubsetParams& sp, int state,
                           const Observation& y, bool normalized);

/// Statistics at the first observation: filter ∝ prior·weights, transition
/// stats zero, and the active sensors' blocks seeded with δ_{ij}·moments
/// (their clocks start at 1; inactive sensors stay zeroed at clock 0).
EMState em_init(const Belief& pi, const Observation& y0,
                const SubsetParams& sp0, const ActivationVector& b0,
                const SensorLibrary& lib, bool normalized);

/// φ'(k) ∝ Σ_{k₁} φ(k₁)·P(k₁,k)·weight(k), log-domain with max shift.
Belief filter_update(const Belief& phi_prev, const TransitionMatrix& tpm,
                     const SubsetParams& sp, const Observation& y,
                     bool normalized);

/// r(i|j) = φ(i)P(i,j) / Σ_{i₁} φ(i₁)P(i₁,j); an all-zero column falls
/// back to uniform.
RetrospectiveKernel retrospective(const Belief& phi_prev,
                                  const TransitionMatrix& tpm);

/// Smoothed-statistic recursion. gamma_a is the step for the transition
/// stats (the caller indexes its schedule so the first recursion gets a
/// full step); sensor blocks derive their own steps from their clocks and
/// `gamma`. Sensor-stat updates can be skipped wholesale when nothing
/// downstream consumes them.
void e_step(EMState& st, const RetrospectiveKernel& r, const Observation& y,
            const ActivationVector& b, double gamma_a,
            const StepSchedule& gamma, bool update_sensor_stats);

struct MStepResult {
  TransitionMatrix tpm;
  // Input subset with re-estimated blocks; left empty when both parameter
  // families are known (nothing to write back).
  SubsetParams params;
};

/// Re-estimation: transition matrix rows from the weighted transition
/// stats (a row with no mass keeps its previous value); per active sensor
/// and state, mean = S₁/S₀ and covariance = S₂/S₀ − μμᵀ symmetrized and
/// eigenvalue-floored at 1e-6, skipped when S₀ < 1e-8. The known_* flags
/// freeze the respective parameters.
MStepResult m_step(const EMState& st, const TransitionMatrix& prev_tpm,
                   const SubsetParams& sp, const ActivationVector& b,
                   bool known_means, bool known_covs);

/// Copy re-estimated blocks of the active sensors back into the library;
/// inactive sensors untouched. Throws DimensionError on shape mismatch.
void writeback(SensorLibrary& lib, const ActivationVector& b,
               const SubsetParams& updated);

/// Orchestrates the recursion across a run and owns the evolving
/// transition matrix estimate.
class OnlineEM {
 public:
  struct Options {
    bool known_means = true;
    bool known_covs = true;
    bool normalized_weight = true;
  };

  OnlineEM(Belief pi, TransitionMatrix initial_tpm, Options opt,
           StepSchedule gamma);

  /// Feed step t (t = 0 initializes). sp must be the library slice for b.
  /// Re-estimated parameters are written back into `lib`.
  void step(std::int64_t t, const Observation& y, const ActivationVector& b,
            const SubsetParams& sp, SensorLibrary& lib);

  const TransitionMatrix& tpm() const { return tpm_; }
  const EMState& state() const { return state_; }
  const Belief& filter() const { return state_.phi; }

 private:
  Belief pi_;
  TransitionMatrix tpm_;
  Options opt_;
  StepSchedule gamma_;
  EMState state_;
  bool initialized_ = false;
};

}  // namespace gem

#endif  // GEM_ONLINE_EM_HPP

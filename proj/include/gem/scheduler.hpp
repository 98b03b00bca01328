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

#ifndef GEM_SCHEDULER_HPP
#define GEM_SCHEDULER_HPP

#include <cstdint>
#include <unordered_map>

#include "gem/rng.hpp"
#include "gem/sensors.hpp"

namespace gem {

// Step-size sequence n ↦ n^(−exponent), n ≥ 1, so the first update always
// takes a full step. Callers that count time from 0 pass t+1. The fast
// sequence drives the per-subset cost estimates, the slow one the
// multiplier and the EM statistics; slow/fast → 0 keeps the timescales
// separated.
class StepSchedule {
 public:
  enum class Kind { fast, slow };

  StepSchedule(double exponent, Kind kind);

  /// n^(−exponent). Throws InvalidIndexError for n < 1.
  double operator()(std::int64_t n) const;

  double exponent() const { return exponent_; }
  Kind kind() const { return kind_; }

 private:
  double exponent_;
  Kind kind_;
};

// Sparse per-subset cost state: an estimate of the tracking error under
// each activation vector that has actually been used, plus its visit
// count. Unvisited subsets read as default_mse. Memory grows only with the
// number of distinct visited vectors.
class CostTable {
 public:
  CostTable(double default_mse, double bound);

  double mse(const ActivationVector& b) const;
  std::int64_t visits(const ActivationVector& b) const;

  /// h(b) = f(b) + λ·‖b‖₁.
  double cost(double lambda, const ActivationVector& b) const;

  /// Robbins–Monro update of the estimate for the vector just used:
  /// f ← clip(f + α(ν)(observed − f), 0, bound) with ν the new visit
  /// count, so a first visit overwrites with the observation.
  void update(const ActivationVector& b_used, double observed_error,
              const StepSchedule& alpha);

  std::size_t distinct_visited() const { return table_.size(); }
  double default_mse() const { return default_mse_; }
  double bound() const { return bound_; }

  /// Min/max stored estimate, {0, 0} when empty. For invariant checks.
  std::pair<double, double> value_range() const;

 private:
  struct Entry {
    double f;
    std::int64_t visits;
  };
  std::unordered_map<ActivationVector, Entry, ActivationHash> table_;
  double default_mse_;
  double bound_;
};

// Lagrange multiplier with clamped stochastic-approximation updates.
class Multiplier {
 public:
  Multiplier(double initial, double bound);

  double value() const { return lambda_; }
  double bound() const { return bound_; }

  /// λ ← clip(λ + γ(t+1)·(activec − target), 0, bound). t counts from 0,
  /// so the first update uses the full step γ(1) = 1.
  void update(std::int64_t t, int active_count, double target,
              const StepSchedule& gamma);

 private:
  double lambda_;
  double bound_;
};

/// Activation probability of the single-site draw given the two costs,
/// computed in stable logistic form 1/(1 + exp(β(h_on − h_off))).
double gibbs_activation_probability(double cost_on, double cost_off,
                                    double beta);

/// One single-site update: pick a sensor uniformly, set its bit by the
/// two-point softmax over the costs with that bit on versus off; every
/// other bit is carried over.
ActivationVector gibbs_step(const ActivationVector& prev,
                            const CostTable& table, double lambda, double beta,
                            RandomStream& rng);

}  // namespace gem

#endif  // GEM_SCHEDULER_HPP

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

#ifndef GEM_SENSORS_HPP
#define GEM_SENSORS_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "gem/chain.hpp"
#include "gem/linalg.hpp"
#include "gem/rng.hpp"

namespace gem {

/// Per-sensor observation model: for each chain state i, observations are
/// Gaussian with mean means[i] and covariance covs[i], both of dimension
/// `dim`. The same struct stores ground truth and running estimates.
struct SensorParams {
  int dim = 0;
  std::vector<Vec> means;  // q vectors of length dim
  std::vector<Mat> covs;   // q PSD matrices dim×dim

  bool operator==(const SensorParams&) const = default;
};

class SensorLibrary {
 public:
  SensorLibrary() = default;
  SensorLibrary(std::vector<SensorParams> sensors, int q);

  /// Random instance: mean entries i.i.d. normal scaled by mean_spread
  /// (default 3.0), covariances L·Lᵀ + 0.1·I with L entries i.i.d.
  /// standard normal.
  static SensorLibrary random(int n_sensors, int q, std::span<const int> dims,
                              double mean_spread, RandomStream& rng);
  static SensorLibrary random(int n_sensors, int q, std::span<const int> dims,
                              RandomStream& rng) {
    return random(n_sensors, q, dims, 3.0, rng);
  }

  int size() const { return static_cast<int>(sensors_.size()); }
  int q() const { return q_; }
  const SensorParams& sensor(int k) const { return sensors_[k]; }
  SensorParams& sensor(int k) { return sensors_[k]; }
  int total_dim() const;

  bool operator==(const SensorLibrary&) const = default;

 private:
  std::vector<SensorParams> sensors_;
  int q_ = 0;
};

/// Which sensors sense and report this step.
class ActivationVector {
 public:
  ActivationVector() = default;
  explicit ActivationVector(int n) : bits_(n, 0) {}
  static ActivationVector ones(int n) {
    ActivationVector b(n);
    for (auto& v : b.bits_) v = 1;
    return b;
  }

  int size() const { return static_cast<int>(bits_.size()); }
  bool test(int k) const { return bits_[k] != 0; }
  void set(int k, bool v) { bits_[k] = v ? 1 : 0; }

  int count() const {
    int c = 0;
    for (auto v : bits_) c += v;
    return c;
  }
  bool none() const { return count() == 0; }

  const std::vector<std::uint8_t>& bits() const { return bits_; }
  bool operator==(const ActivationVector&) const = default;

 private:
  std::vector<std::uint8_t> bits_;
};

struct ActivationHash {
  std::size_t operator()(const ActivationVector& b) const {
    // FNV-1a over the bit bytes.
    std::size_t h = 1469598103934665603ull;
    for (auto v : b.bits()) {
      h ^= v;
      h *= 1099511628211ull;
    }
    return h;
  }
};

/// Observations of one step: per-sensor blocks for the active sensors (in
/// ascending sensor order) plus their vertical concatenation. Empty when
/// nothing is active.
struct Observation {
  std::vector<int> sensors;
  std::vector<Vec> blocks;
  Vec stacked;

  bool empty() const { return stacked.empty(); }
};

/// The slice of a library corresponding to one activation vector: stacked
/// means per state and per-sensor covariance blocks per state, in active
/// sensor order. mean_matrix has the stacked means as columns.
struct SubsetParams {
  std::vector<int> sensors;  // active sensor ids
  std::vector<int> offsets;  // where each block starts in the stack
  std::vector<int> dims;     // block dimensions
  int m = 0;                 // total stacked dimension
  int q = 0;

  std::vector<Vec> means;                    // q stacked means
  std::vector<std::vector<Mat>> cov_blocks;  // [state][active slot]
  Mat mean_matrix;                           // m×q

  /// Materialize the block-diagonal covariance of one state.
  Mat blkdiag_cov(int state) const;
};

/// Sample observations for the active set given the true state. Covariances
/// are factored with jitter retries (+1e-10·I, 3 attempts) before
/// CholeskyError propagates.
Observation observe(const SensorLibrary& lib, const ActivationVector& b,
                    StateIndex s, RandomStream& rng);

SubsetParams subset_params(const SensorLibrary& lib,
                           const ActivationVector& b);

/// Observation moments as consumed by the EM statistics: order 0 is the
/// scalar 1, order 1 the stacked vector, order 2 the per-sensor
/// block-diagonal of y_k y_kᵀ (cross-sensor products are never formed).
struct Moments {
  double m0 = 1.0;
  Vec m1;
  Mat m2;
};
Moments stack_moments(const Observation& y);

}  // namespace gem

#endif  // GEM_SENSORS_HPP

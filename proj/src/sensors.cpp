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

#include "gem/sensors.hpp"

#include <cassert>

#include "gem/errors.hpp"

namespace gem {

namespace {
constexpr double kCovJitter = 1e-10;
constexpr int kCovJitterAttempts = 3;
constexpr double kCovRidge = 0.1;
}  // namespace

SensorLibrary::SensorLibrary(std::vector<SensorParams> sensors, int q)
    : sensors_(std::move(sensors)), q_(q) {
  for (const auto& s : sensors_) {
    if (static_cast<int>(s.means.size()) != q ||
        static_cast<int>(s.covs.size()) != q)
      throw DimensionError("sensor parameter count does not match q");
    for (const auto& mu : s.means)
      if (static_cast<int>(mu.size()) != s.dim)
        throw DimensionError("sensor mean dimension mismatch");
    for (const auto& c : s.covs)
      if (static_cast<int>(c.rows()) != s.dim ||
          static_cast<int>(c.cols()) != s.dim)
        throw DimensionError("sensor covariance dimension mismatch");
  }
}

SensorLibrary SensorLibrary::random(int n_sensors, int q,
                                    std::span<const int> dims,
                                    double mean_spread, RandomStream& rng) {
  assert(n_sensors >= 1 && q >= 1);
  assert(static_cast<int>(dims.size()) == n_sensors);
  std::vector<SensorParams> sensors(n_sensors);
  for (int k = 0; k < n_sensors; ++k) {
    const int d = dims[k];
    assert(d >= 1);
    SensorParams& s = sensors[k];
    s.dim = d;
    s.means.reserve(q);
    s.covs.reserve(q);
    for (int i = 0; i < q; ++i) {
      Vec mu(d);
      for (auto& v : mu) v = mean_spread * rng.normal();
      s.means.push_back(std::move(mu));
      Mat l(d, d);
      for (std::size_t e = 0; e < l.size(); ++e) l.data()[e] = rng.normal();
      Mat cov = matmul_nt(l, l);  // L·Lᵀ
      for (int e = 0; e < d; ++e) cov(e, e) += kCovRidge;
      s.covs.push_back(std::move(cov));
    }
  }
  return SensorLibrary(std::move(sensors), q);
}

int SensorLibrary::total_dim() const {
  int m = 0;
  for (const auto& s : sensors_) m += s.dim;
  return m;
}

Observation observe(const SensorLibrary& lib, const ActivationVector& b,
                    StateIndex s, RandomStream& rng) {
  assert(b.size() == lib.size());
  Observation y;
  for (int k = 0; k < lib.size(); ++k) {
    if (!b.test(k)) continue;
    const SensorParams& sp = lib.sensor(k);
    const Cholesky chol =
        cholesky_jittered(sp.covs[s], kCovJitter, kCovJitterAttempts);
    Vec z(sp.dim);
    for (auto& v : z) v = rng.normal();
    Vec yk = sp.means[s];
    for (int i = 0; i < sp.dim; ++i)
      for (int j = 0; j <= i; ++j) yk[i] += chol.L(i, j) * z[j];
    y.sensors.push_back(k);
    y.stacked.insert(y.stacked.end(), yk.begin(), yk.end());
    y.blocks.push_back(std::move(yk));
  }
  return y;
}

SubsetParams subset_params(const SensorLibrary& lib,
                           const ActivationVector& b) {
  assert(b.size() == lib.size());
  SubsetParams sp;
  sp.q = lib.q();
  for (int k = 0; k < lib.size(); ++k) {
    if (!b.test(k)) continue;
    sp.sensors.push_back(k);
    sp.offsets.push_back(sp.m);
    sp.dims.push_back(lib.sensor(k).dim);
    sp.m += lib.sensor(k).dim;
  }
  sp.means.assign(sp.q, Vec());
  sp.cov_blocks.assign(sp.q, {});
  sp.mean_matrix = Mat(sp.m, sp.q);
  for (int i = 0; i < sp.q; ++i) {
    Vec& mu = sp.means[i];
    mu.reserve(sp.m);
    sp.cov_blocks[i].reserve(sp.sensors.size());
    for (int a = 0; a < static_cast<int>(sp.sensors.size()); ++a) {
      const SensorParams& s = lib.sensor(sp.sensors[a]);
      mu.insert(mu.end(), s.means[i].begin(), s.means[i].end());
      sp.cov_blocks[i].push_back(s.covs[i]);
    }
    for (int r = 0; r < sp.m; ++r) sp.mean_matrix(r, i) = mu[r];
  }
  return sp;
}

Mat SubsetParams::blkdiag_cov(int state) const {
  Mat out(m, m);
  for (std::size_t a = 0; a < sensors.size(); ++a) {
    const Mat& block = cov_blocks[state][a];
    const int off = offsets[a];
    for (int i = 0; i < dims[a]; ++i)
      for (int j = 0; j < dims[a]; ++j) out(off + i, off + j) = block(i, j);
  }
  return out;
}

Moments stack_moments(const Observation& y) {
  Moments m;
  m.m1 = y.stacked;
  const int n = static_cast<int>(y.stacked.size());
  m.m2 = Mat(n, n);
  int off = 0;
  for (const Vec& block : y.blocks) {
    const int d = static_cast<int>(block.size());
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        m.m2(off + i, off + j) = block[i] * block[j];
    off += d;
  }
  return m;
}

}  // namespace gem

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

#include "gem/online_em.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

#include "gem/errors.hpp"
#include "gem/kernels.hpp"

namespace gem {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kMassGuard = 1e-8;
constexpr double kCovFloor = 1e-6;
constexpr double kBlockJitter = 1e-10;
constexpr int kBlockJitterAttempts = 3;

Vec log_weights(const SubsetParams& sp, const Observation& y, int q,
                bool normalized) {
  Vec lw(q, 0.0);
  if (y.empty()) return lw;
  for (int i = 0; i < q; ++i)
    lw[i] = log_gaussian_weight(sp, i, y, normalized);
  return lw;
}

void normalize_shifted(Vec& logs, Vec& out) {
  const double shift = *std::max_element(logs.begin(), logs.end());
  double total = 0.0;
  out.resize(logs.size());
  for (std::size_t k = 0; k < logs.size(); ++k) {
    out[k] = std::isfinite(logs[k]) ? std::exp(logs[k] - shift) : 0.0;
    total += out[k];
  }
  if (total <= 0.0) {
    std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(out.size()));
    return;
  }
  for (double& v : out) v /= total;
}

}  // namespace

double log_gaussian_weight(const SubsetParams& sp, int state,
                           const Observation& y, bool normalized) {
  if (y.empty()) return 0.0;
  assert(static_cast<int>(y.stacked.size()) == sp.m);
  double quad = 0.0;
  double log_det = 0.0;
  for (std::size_t a = 0; a < sp.sensors.size(); ++a) {
    const int d = sp.dims[a];
    const int off = sp.offsets[a];
    const Cholesky chol = cholesky_jittered(sp.cov_blocks[state][a],
                                            kBlockJitter, kBlockJitterAttempts);
    Vec resid(d);
    for (int r = 0; r < d; ++r)
      resid[r] = y.stacked[off + r] - sp.means[state][off + r];
    const Vec z = chol.solve_lower(resid);
    quad += norm2_squared(z);
    if (normalized) log_det += chol.log_det();
  }
  double lw = -0.5 * quad;
  if (normalized) lw -= 0.5 * (log_det + sp.m * std::log(kTwoPi));
  return lw;
}

EMState em_init(const Belief& pi, const Observation& y0,
                const SubsetParams& sp0, const ActivationVector& b0,
                const SensorLibrary& lib, bool normalized) {
  const int q = lib.q();
  assert(static_cast<int>(pi.size()) == q);
  for (const int k : y0.sensors) {
    assert(b0.test(k));
    (void)k;
  }
  (void)b0;
  EMState st;

  Vec lw = log_weights(sp0, y0, q, normalized);
  for (int k = 0; k < q; ++k)
    lw[k] = pi.p[k] > 0.0 ? lw[k] + std::log(pi.p[k])
                          : -std::numeric_limits<double>::infinity();
  st.phi.p.resize(q);
  normalize_shifted(lw, st.phi.p);

  st.rho_a.assign(static_cast<std::size_t>(q) * q * q, 0.0);

  st.sensor_stats.resize(lib.size());
  st.sensor_clock.assign(lib.size(), 0);
  for (int k = 0; k < lib.size(); ++k) {
    SensorStats& s = st.sensor_stats[k];
    s.dim = lib.sensor(k).dim;
    s.comps = 1 + s.dim + s.dim * s.dim;
    s.data.assign(static_cast<std::size_t>(q) * q * s.comps, 0.0);
  }
  for (std::size_t a = 0; a < y0.sensors.size(); ++a) {
    const int k = y0.sensors[a];
    SensorStats& s = st.sensor_stats[k];
    const Vec& block = y0.blocks[a];
    const int d = s.dim;
    for (int i = 0; i < q; ++i) {
      double* dst = s.at(i, i, q);
      dst[0] = 1.0;
      for (int r = 0; r < d; ++r) dst[1 + r] = block[r];
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c)
          dst[1 + d + r * d + c] = block[r] * block[c];
    }
    st.sensor_clock[k] = 1;
  }
  return st;
}

Belief filter_update(const Belief& phi_prev, const TransitionMatrix& tpm,
                     const SubsetParams& sp, const Observation& y,
                     bool normalized) {
  const int q = tpm.q();
  const Vec pred = vecmat(phi_prev.p, tpm.rows());
  Vec logs = log_weights(sp, y, q, normalized);
  for (int k = 0; k < q; ++k)
    logs[k] += pred[k] > 0.0 ? std::log(pred[k])
                             : -std::numeric_limits<double>::infinity();
  Belief out;
  normalize_shifted(logs, out.p);
  return out;
}

RetrospectiveKernel retrospective(const Belief& phi_prev,
                                  const TransitionMatrix& tpm) {
  const int q = tpm.q();
  RetrospectiveKernel r;
  r.by_current = Mat(q, q);
  const Vec denom = vecmat(phi_prev.p, tpm.rows());
  for (int j = 0; j < q; ++j) {
    if (denom[j] > 0.0) {
      for (int i = 0; i < q; ++i)
        r.by_current(j, i) = phi_prev.p[i] * tpm(i, j) / denom[j];
    } else {
      for (int i = 0; i < q; ++i) r.by_current(j, i) = 1.0 / q;
    }
  }
  return r;
}

void e_step(EMState& st, const RetrospectiveKernel& r, const Observation& y,
            const ActivationVector& b, double gamma_a,
            const StepSchedule& gamma, bool update_sensor_stats) {
  const int q = st.q();
  const Mat& rt = r.by_current;

  // Transition statistics: mix over the third index, then drop the
  // innovation on the (i, j = k) fibers.
  Vec next(st.rho_a.size());
  const double keep = 1.0 - gamma_a;
  for (int i = 0; i < q; ++i) {
    for (int j = 0; j < q; ++j) {
      const double* old_fiber = &st.rho_a[(i * q + j) * q];
      double* dst = &next[(i * q + j) * q];
      for (int k = 0; k < q; ++k)
        dst[k] = keep * kernels::dot(old_fiber, rt.row(k), q);
      dst[j] += gamma_a * rt(j, i);  // r(i | j)
    }
  }
  st.rho_a.swap(next);

  if (!update_sensor_stats) return;

  for (int k = 0; k < static_cast<int>(st.sensor_stats.size()); ++k) {
    SensorStats& s = st.sensor_stats[k];
    const int comps = s.comps;
    const double gamma_k = gamma(st.sensor_clock[k] + 1);
    const double keep_k = 1.0 - gamma_k;
    Vec mixed(s.data.size(), 0.0);
    if (keep_k != 0.0) {
      for (int i = 0; i < q; ++i) {
        const double* old_rows = s.at(i, 0, q);
        for (int j = 0; j < q; ++j) {
          double* dst = &mixed[(i * q + j) * comps];
          const double* weights = rt.row(j);
          for (int k1 = 0; k1 < q; ++k1)
            kernels::axpy(weights[k1], old_rows + k1 * comps, dst, comps);
          kernels::scale(keep_k, dst, comps);
        }
      }
    }
    s.data.swap(mixed);
  }

  // Innovation only for the sensors that actually observed, each on its
  // own activation clock.
  for (std::size_t a = 0; a < y.sensors.size(); ++a) {
    const int k = y.sensors[a];
    assert(b.test(k));
    SensorStats& s = st.sensor_stats[k];
    const double gamma_k = gamma(st.sensor_clock[k] + 1);
    const Vec& block = y.blocks[a];
    const int d = s.dim;
    for (int i = 0; i < q; ++i) {
      double* dst = s.at(i, i, q);
      dst[0] += gamma_k;
      for (int r = 0; r < d; ++r) dst[1 + r] += gamma_k * block[r];
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c)
          dst[1 + d + r * d + c] += gamma_k * block[r] * block[c];
    }
    st.sensor_clock[k] += 1;
  }
  (void)b;
}

MStepResult m_step(const EMState& st, const TransitionMatrix& prev_tpm,
                   const SubsetParams& sp, const ActivationVector& b,
                   bool known_means, bool known_covs) {
  const int q = st.q();

  Mat rows(q, q);
  for (int i = 0; i < q; ++i) {
    double mass = 0.0;
    Vec srow(q);
    for (int j = 0; j < q; ++j) {
      srow[j] = kernels::dot(&st.rho_a[(i * q + j) * q], st.phi.p.data(), q);
      mass += srow[j];
    }
    if (mass < kMassGuard) {
      for (int j = 0; j < q; ++j) rows(i, j) = prev_tpm(i, j);
    } else {
      for (int j = 0; j < q; ++j) rows(i, j) = srow[j] / mass;
    }
  }
  MStepResult result{TransitionMatrix(std::move(rows)), SubsetParams{}};

  if (known_means && known_covs) return result;

  SubsetParams updated = sp;
  (void)b;
  for (std::size_t a = 0; a < sp.sensors.size(); ++a) {
    const int k = sp.sensors[a];
    assert(b.test(k));
    const SensorStats& s = st.sensor_stats[k];
    const int d = s.dim;
    const int off = sp.offsets[a];
    for (int i = 0; i < q; ++i) {
      double s0 = 0.0;
      Vec s1(d, 0.0);
      Mat s2(d, d);
      for (int k1 = 0; k1 < q; ++k1) {
        const double w = st.phi.p[k1];
        if (w == 0.0) continue;
        const double* src = s.at(i, k1, q);
        s0 += w * src[0];
        for (int r = 0; r < d; ++r) s1[r] += w * src[1 + r];
        for (int r = 0; r < d; ++r)
          for (int c = 0; c < d; ++c) s2(r, c) += w * src[1 + d + r * d + c];
      }
      if (s0 < kMassGuard) continue;  // not enough evidence for this state

      Vec mu(d);
      if (known_means) {
        for (int r = 0; r < d; ++r) mu[r] = sp.means[i][off + r];
      } else {
        for (int r = 0; r < d; ++r) mu[r] = s1[r] / s0;
        for (int r = 0; r < d; ++r) {
          updated.means[i][off + r] = mu[r];
          updated.mean_matrix(off + r, i) = mu[r];
        }
      }
      if (!known_covs) {
        Mat cov(d, d);
        for (int r = 0; r < d; ++r)
          for (int c = 0; c < d; ++c) cov(r, c) = s2(r, c) / s0 - mu[r] * mu[c];
        updated.cov_blocks[i][a] = psd_floor(std::move(cov), kCovFloor);
      }
    }
  }
  result.params = std::move(updated);
  return result;
}

void writeback(SensorLibrary& lib, const ActivationVector& b,
               const SubsetParams& updated) {
  if (b.size() != lib.size())
    throw DimensionError("activation vector does not match library size");
  for (std::size_t a = 0; a < updated.sensors.size(); ++a) {
    const int k = updated.sensors[a];
    if (!b.test(k))
      throw DimensionError("subset lists a sensor that is not active");
    SensorParams& s = lib.sensor(k);
    const int d = updated.dims[a];
    const int off = updated.offsets[a];
    if (s.dim != d) throw DimensionError("sensor block dimension mismatch");
    for (int i = 0; i < lib.q(); ++i) {
      for (int r = 0; r < d; ++r) s.means[i][r] = updated.means[i][off + r];
      s.covs[i] = updated.cov_blocks[i][a];
    }
  }
}

OnlineEM::OnlineEM(Belief pi, TransitionMatrix initial_tpm, Options opt,
                   StepSchedule gamma)
    : pi_(std::move(pi)),
      tpm_(std::move(initial_tpm)),
      opt_(opt),
      gamma_(gamma) {}

void OnlineEM::step(std::int64_t t, const Observation& y,
                    const ActivationVector& b, const SubsetParams& sp,
                    SensorLibrary& lib) {
  if (!initialized_) {
    state_ = em_init(pi_, y, sp, b, lib, opt_.normalized_weight);
    initialized_ = true;
    return;
  }
  assert(t >= 1);
  const RetrospectiveKernel r = retrospective(state_.phi, tpm_);
  Belief next_phi =
      filter_update(state_.phi, tpm_, sp, y, opt_.normalized_weight);
  const bool track_sensors = !(opt_.known_means && opt_.known_covs);
  e_step(state_, r, y, b, gamma_(t), gamma_, track_sensors);
  state_.phi = std::move(next_phi);
  MStepResult m =
      m_step(state_, tpm_, sp, b, opt_.known_means, opt_.known_covs);
  tpm_ = std::move(m.tpm);
  if (track_sensors) writeback(lib, b, m.params);
}

}  // namespace gem

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

#include "gem/estimator.hpp"

#include <algorithm>
#include <cassert>

#include "gem/errors.hpp"
#include "gem/kernels.hpp"

namespace gem {

Belief project_to_simplex(const Vec& v) {
  const std::size_t n = v.size();
  assert(n >= 1);
  Vec sorted = v;
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double cum = 0.0, tau = 0.0;
  std::size_t support = 0;
  for (std::size_t j = 0; j < n; ++j) {
    cum += sorted[j];
    const double candidate = (cum - 1.0) / static_cast<double>(j + 1);
    if (sorted[j] - candidate > 0.0) {
      tau = candidate;
      support = j + 1;
    }
  }
  (void)support;
  Belief w{Vec(n)};
  for (std::size_t i = 0; i < n; ++i) w.p[i] = std::max(v[i] - tau, 0.0);
  return w;
}

Mat belief_cov(const Belief& x) {
  const std::size_t q = x.size();
  Mat cov(q, q);
  for (std::size_t i = 0; i < q; ++i) {
    for (std::size_t j = 0; j < q; ++j) cov(i, j) = -x.p[i] * x.p[j];
    cov(i, i) += x.p[i];
  }
  return cov;
}

Belief predict(const TransitionMatrix& p, const Belief& prev) {
  // Row convention: the predicted belief is prevᵀ·P.
  return Belief{vecmat(prev.p, p.rows())};
}

EstimatorState initial_estimator_state(const Belief& pi) {
  EstimatorState st;
  st.belief = pi;
  st.predicted = pi;
  st.cov_est = belief_cov(pi);
  st.cov_pred = st.cov_est;
  return st;
}

EstimatorState estimate_step(const EstimatorState& prev,
                             const TransitionMatrix& tpm,
                             const SubsetParams& sp, const ActivationVector& b,
                             const Observation& y) {
  const int q = tpm.q();
  EstimatorState st;
  st.predicted = predict(tpm, prev.belief);
  st.cov_pred = belief_cov(st.predicted);

  if (b.none()) {
    st.belief = st.predicted;
    st.cov_est = st.cov_pred;
    return st;
  }

  assert(sp.m == static_cast<int>(y.stacked.size()));
  const Mat& mean_matrix = sp.mean_matrix;  // m×q
  const int m = sp.m;

  // Predicted observation and innovation.
  Vec y_pred = matvec(mean_matrix, st.predicted.p);
  Vec innovation = sub(y.stacked, y_pred);

  // Innovation covariance: M Σ Mᵀ plus the belief-averaged observation
  // noise, which stays block-diagonal per sensor.
  Mat m_sigma = matmul(mean_matrix, st.cov_pred);      // m×q
  Mat s = matmul_nt(m_sigma, mean_matrix);             // m×m
  for (std::size_t a = 0; a < sp.sensors.size(); ++a) {
    const int off = sp.offsets[a];
    const int d = sp.dims[a];
    for (int i = 0; i < q; ++i) {
      const double w = st.predicted.p[i];
      if (w == 0.0) continue;
      const Mat& block = sp.cov_blocks[i][a];
      for (int r = 0; r < d; ++r)
        kernels::axpy(w, block.row(r), s.row(off + r) + off, d);
    }
  }

  auto chol = cholesky(s);
  if (!chol) {
    for (int i = 0; i < m; ++i) s(i, i) += 1e-9;
    chol = cholesky(s);
    if (!chol)
      throw SingularInnovationError(
          "innovation covariance singular after regularization");
  }

  // Gain applied to the innovation: G d = (Σ Mᵀ) S⁻¹ d.
  const Vec s_inv_innovation = chol->solve(innovation);
  Vec update(q, 0.0);
  // Σ Mᵀ = m_sigmaᵀ, so row i of Σ Mᵀ is column i of m_sigma.
  for (int i = 0; i < q; ++i) {
    double acc = 0.0;
    for (int r = 0; r < m; ++r) acc += m_sigma(r, i) * s_inv_innovation[r];
    update[i] = acc;
  }

  Vec posterior = st.predicted.p;
  for (int i = 0; i < q; ++i) posterior[i] += update[i];
  st.belief = project_to_simplex(posterior);
  st.cov_est = belief_cov(st.belief);
  return st;
}

}  // namespace gem

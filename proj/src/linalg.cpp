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

#include "gem/linalg.hpp"

#include <cassert>
#include <cmath>
#include <cstdlib>

#include "gem/errors.hpp"
#include "gem/kernels.hpp"

namespace gem {

Mat Mat::identity(std::size_t n) {
  Mat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Vec matvec(const Mat& m, const Vec& x) {
  assert(x.size() == m.cols());
  Vec y(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    y[i] = kernels::dot(m.row(i), x.data(), m.cols());
  return y;
}

Vec vecmat(const Vec& x, const Mat& m) {
  assert(x.size() == m.rows());
  Vec y(m.cols(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i)
    kernels::axpy(x[i], m.row(i), y.data(), m.cols());
  return y;
}

Mat matmul(const Mat& a, const Mat& b) {
  assert(a.cols() == b.rows());
  Mat c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k)
      kernels::axpy(a(i, k), b.row(k), c.row(i), b.cols());
  return c;
}

Mat matmul_nt(const Mat& a, const Mat& b) {
  assert(a.cols() == b.cols());
  Mat c(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.rows(); ++j)
      c(i, j) = kernels::dot(a.row(i), b.row(j), a.cols());
  return c;
}

Mat transpose(const Mat& m) {
  Mat t(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) t(j, i) = m(i, j);
  return t;
}

double trace(const Mat& m) {
  double t = 0.0;
  for (std::size_t i = 0; i < m.rows() && i < m.cols(); ++i) t += m(i, i);
  return t;
}

void symmetrize(Mat& m) {
  assert(m.rows() == m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j) {
      const double v = 0.5 * (m(i, j) + m(j, i));
      m(i, j) = v;
      m(j, i) = v;
    }
}

double frobenius_distance(const Mat& a, const Mat& b) {
  assert(a.rows() == b.rows() && a.cols() == b.cols());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.data()[i] - b.data()[i];
    s += d * d;
  }
  return std::sqrt(s);
}

double max_asymmetry(const Mat& m) {
  double worst = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j)
      worst = std::max(worst, std::abs(m(i, j) - m(j, i)));
  return worst;
}

Vec sub(const Vec& a, const Vec& b) {
  assert(a.size() == b.size());
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

double dot(const Vec& a, const Vec& b) {
  assert(a.size() == b.size());
  return kernels::dot(a.data(), b.data(), a.size());
}

double norm2_squared(const Vec& v) {
  return kernels::dot(v.data(), v.data(), v.size());
}

double l1_distance(const Vec& a, const Vec& b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s;
}

void axpy(double a, const Vec& x, Vec& y) {
  assert(x.size() == y.size());
  kernels::axpy(a, x.data(), y.data(), x.size());
}

double Cholesky::log_det() const {
  double s = 0.0;
  for (std::size_t i = 0; i < L.rows(); ++i) s += std::log(L(i, i));
  return 2.0 * s;
}

Vec Cholesky::solve_lower(const Vec& b) const {
  const std::size_t n = L.rows();
  assert(b.size() == n);
  Vec z(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = kernels::dot(L.row(i), z.data(), i);
    z[i] = (b[i] - s) / L(i, i);
  }
  return z;
}

Vec Cholesky::solve(const Vec& b) const {
  const std::size_t n = L.rows();
  Vec x = solve_lower(b);
  for (std::size_t ii = n; ii-- > 0;) {
    double s = 0.0;
    for (std::size_t j = ii + 1; j < n; ++j) s += L(j, ii) * x[j];
    x[ii] = (x[ii] - s) / L(ii, ii);
  }
  return x;
}

Mat Cholesky::solve(const Mat& b) const {
  Mat x(b.rows(), b.cols());
  Vec col(b.rows());
  for (std::size_t j = 0; j < b.cols(); ++j) {
    for (std::size_t i = 0; i < b.rows(); ++i) col[i] = b(i, j);
    const Vec sol = solve(col);
    for (std::size_t i = 0; i < b.rows(); ++i) x(i, j) = sol[i];
  }
  return x;
}

std::optional<Cholesky> cholesky(const Mat& m) {
  assert(m.rows() == m.cols());
  const std::size_t n = m.rows();
  Mat L(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double s = kernels::dot(L.row(i), L.row(j), j);
      if (i == j) {
        const double d = m(i, i) - s;
        if (d <= 0.0 || !std::isfinite(d)) return std::nullopt;
        L(i, i) = std::sqrt(d);
      } else {
        L(i, j) = (m(i, j) - s) / L(j, j);
      }
    }
  }
  return Cholesky{std::move(L)};
}

Cholesky cholesky_jittered(Mat m, double jitter, int attempts) {
  if (auto c = cholesky(m)) return std::move(*c);
  for (int k = 0; k < attempts; ++k) {
    for (std::size_t i = 0; i < m.rows(); ++i) m(i, i) += jitter;
    if (auto c = cholesky(m)) return std::move(*c);
  }
  throw CholeskyError("matrix not positive definite after jitter retries");
}

SymEig sym_eig(Mat m) {
  assert(m.rows() == m.cols());
  const std::size_t n = m.rows();
  symmetrize(m);
  Mat v = Mat::identity(n);
  if (n <= 1) {
    SymEig out;
    out.values = n == 1 ? Vec{m(0, 0)} : Vec{};
    out.vectors = v;
    return out;
  }
  // Cyclic Jacobi: sweep the upper triangle in row order, rotating away
  // every off-diagonal entry above a shrinking threshold.
  constexpr int kMaxSweeps = 64;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += m(i, j) * m(i, j);
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n - 1; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = m(p, q);
        if (std::abs(apq) < 1e-300) continue;
        const double app = m(p, p), aqq = m(q, q);
        const double theta = 0.5 * (aqq - app) / apq;
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double mkp = m(k, p), mkq = m(k, q);
          m(k, p) = c * mkp - s * mkq;
          m(k, q) = s * mkp + c * mkq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double mpk = m(p, k), mqk = m(q, k);
          m(p, k) = c * mpk - s * mqk;
          m(q, k) = s * mpk + c * mqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  // Sort ascending by eigenvalue, permuting vector columns alongside.
  SymEig out;
  out.values.resize(n);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (m(order[j], order[j]) < m(order[i], order[i]))
        std::swap(order[i], order[j]);
  out.vectors = Mat(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    out.values[i] = m(order[i], order[i]);
    for (std::size_t k = 0; k < n; ++k) out.vectors(k, i) = v(k, order[i]);
  }
  return out;
}

double min_eigenvalue(const Mat& m) {
  const SymEig e = sym_eig(m);
  return e.values.empty() ? 0.0 : e.values.front();
}

Mat psd_floor(Mat m, double floor_val) {
  symmetrize(m);
  SymEig e = sym_eig(m);
  const std::size_t n = m.rows();
  bool clipped = false;
  for (auto& lambda : e.values) {
    if (lambda < floor_val) {
      lambda = floor_val;
      clipped = true;
    }
  }
  if (!clipped) return m;
  Mat out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k)
        s += e.vectors(i, k) * e.values[k] * e.vectors(j, k);
      out(i, j) = s;
      out(j, i) = s;
    }
  return out;
}

}  // namespace gem

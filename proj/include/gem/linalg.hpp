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

#ifndef GEM_LINALG_HPP
#define GEM_LINALG_HPP

#include <cstddef>
#include <optional>
#include <vector>

namespace gem {

using Vec = std::vector<double>;

/// Dense row-major matrix of doubles. Small and value-semantic; everything
/// in this project is at most a few tens of rows.
class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Mat identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) {
    return data_[i * cols_ + j];
  }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  double* row(std::size_t i) { return data_.data() + i * cols_; }
  const double* row(std::size_t i) const { return data_.data() + i * cols_; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::size_t size() const { return data_.size(); }

  bool operator==(const Mat&) const = default;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  Vec data_;
};

Vec matvec(const Mat& m, const Vec& x);   // m·x
Vec vecmat(const Vec& x, const Mat& m);   // xᵀ·m (weighted sum of rows)
Mat matmul(const Mat& a, const Mat& b);   // a·b
Mat matmul_nt(const Mat& a, const Mat& b);  // a·bᵀ
Mat transpose(const Mat& m);
double trace(const Mat& m);
void symmetrize(Mat& m);  // m ← (m + mᵀ)/2
double frobenius_distance(const Mat& a, const Mat& b);
double max_asymmetry(const Mat& m);  // max |m(i,j) − m(j,i)|

Vec sub(const Vec& a, const Vec& b);
double dot(const Vec& a, const Vec& b);
double norm2_squared(const Vec& v);
double l1_distance(const Vec& a, const Vec& b);
void axpy(double a, const Vec& x, Vec& y);

/// Lower-triangular Cholesky factor of an SPD matrix.
struct Cholesky {
  Mat L;

  /// log det of the factored matrix (twice the sum of log diagonal).
  double log_det() const;

  Vec solve_lower(const Vec& b) const;  // L z = b
  Vec solve(const Vec& b) const;        // L Lᵀ x = b
  Mat solve(const Mat& b) const;        // columnwise
};

/// Plain factorization; empty if the matrix is not positive definite
/// enough for the factorization to go through.
std::optional<Cholesky> cholesky(const Mat& m);

/// Factorization with jitter retries: each failed attempt adds
/// `jitter`·I and tries again, up to `attempts` retries in total.
/// Throws CholeskyError when everything fails.
Cholesky cholesky_jittered(Mat m, double jitter, int attempts);

/// Symmetric eigendecomposition by cyclic Jacobi rotations. Thresholded
/// sweeps, deterministic order. values[] ascending; vectors has the
/// corresponding eigenvectors as columns.
struct SymEig {
  Vec values;
  Mat vectors;
};
SymEig sym_eig(Mat m);

double min_eigenvalue(const Mat& m);

/// Symmetrize, then clamp eigenvalues from below at floor_val.
Mat psd_floor(Mat m, double floor_val);

}  // namespace gem

#endif  // GEM_LINALG_HPP

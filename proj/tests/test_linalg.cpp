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

#include <doctest.h>

#include <cmath>

#include "gem/errors.hpp"
#include "gem/linalg.hpp"
#include "gem/rng.hpp"

using namespace gem;

namespace {

Mat random_spd(int n, RandomStream& rng, double ridge = 0.5) {
  Mat l(n, n);
  for (std::size_t i = 0; i < l.size(); ++i) l.data()[i] = rng.normal();
  Mat m = matmul_nt(l, l);
  for (int i = 0; i < n; ++i) m(i, i) += ridge;
  return m;
}

}  // namespace

TEST_CASE("matvec and vecmat agree with hand results") {
  Mat m(2, 3);
  m(0, 0) = 1;
  m(0, 1) = 2;
  m(0, 2) = 3;
  m(1, 0) = 4;
  m(1, 1) = 5;
  m(1, 2) = 6;
  const Vec x = {1.0, -1.0, 2.0};
  const Vec y = matvec(m, x);
  CHECK(y[0] == 5.0);
  CHECK(y[1] == 11.0);
  const Vec z = vecmat({1.0, 2.0}, m);
  CHECK(z[0] == 9.0);
  CHECK(z[1] == 12.0);
  CHECK(z[2] == 15.0);
}

TEST_CASE("cholesky solves SPD systems") {
  RandomStream rng(17);
  for (int n : {1, 2, 5, 12}) {
    const Mat m = random_spd(n, rng);
    const auto chol = cholesky(m);
    REQUIRE(chol.has_value());
    Vec b(n);
    for (auto& v : b) v = rng.normal();
    const Vec x = chol->solve(b);
    const Vec back = matvec(m, x);
    for (int i = 0; i < n; ++i)
      CHECK(back[i] == doctest::Approx(b[i]).epsilon(1e-8));
  }
}

TEST_CASE("cholesky rejects indefinite matrices, jitter repairs tiny dips") {
  Mat bad(2, 2);
  bad(0, 0) = 1.0;
  bad(0, 1) = 2.0;
  bad(1, 0) = 2.0;
  bad(1, 1) = 1.0;  // eigenvalues 3, -1
  CHECK(!cholesky(bad).has_value());
  CHECK_THROWS_AS(cholesky_jittered(bad, 1e-10, 3), CholeskyError);

  Mat dip(2, 2);
  dip(0, 0) = 1.0;
  dip(1, 1) = -1e-12;  // barely indefinite
  const Cholesky fixed = cholesky_jittered(dip, 1e-10, 3);
  CHECK(fixed.L(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("log_det matches direct determinant") {
  RandomStream rng(23);
  const Mat m = random_spd(2, rng);
  const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  const auto chol = cholesky(m);
  REQUIRE(chol.has_value());
  CHECK(chol->log_det() == doctest::Approx(std::log(det)).epsilon(1e-10));
}

TEST_CASE("sym_eig recovers a known spectrum") {
  // diag(1, 4) rotated by 45 degrees.
  const double c = std::sqrt(0.5);
  Mat m(2, 2);
  m(0, 0) = c * c * 1 + c * c * 4;
  m(0, 1) = c * c * (4 - 1);
  m(1, 0) = m(0, 1);
  m(1, 1) = m(0, 0);
  const SymEig e = sym_eig(m);
  CHECK(e.values[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(e.values[1] == doctest::Approx(4.0).epsilon(1e-10));
}

TEST_CASE("sym_eig reconstructs random symmetric matrices") {
  RandomStream rng(31);
  for (int n : {2, 3, 6, 10}) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) {
        m(i, j) = rng.normal();
        m(j, i) = m(i, j);
      }
    const SymEig e = sym_eig(m);
    // V diag(values) Vᵀ == m
    Mat rec(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int k = 0; k < n; ++k)
          s += e.vectors(i, k) * e.values[k] * e.vectors(j, k);
        rec(i, j) = s;
      }
    CHECK(frobenius_distance(rec, m) < 1e-9);
  }
}

TEST_CASE("psd_floor clamps negative eigenvalues") {
  Mat m(2, 2);
  m(0, 0) = 1.0;
  m(0, 1) = 2.0;
  m(1, 0) = 2.0;
  m(1, 1) = 1.0;  // eigenvalues 3, -1
  const Mat fixed = psd_floor(m, 1e-6);
  CHECK(min_eigenvalue(fixed) >= 1e-6 - 1e-12);
  // The positive part of the spectrum is untouched.
  const SymEig e = sym_eig(fixed);
  CHECK(e.values[1] == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("psd_floor leaves compliant matrices alone") {
  RandomStream rng(37);
  const Mat m = random_spd(3, rng, 1.0);
  const Mat out = psd_floor(m, 1e-6);
  // Already symmetric PSD: returned unchanged up to the symmetrize pass.
  CHECK(frobenius_distance(out, m) < 1e-12);
}

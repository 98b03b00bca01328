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

// NEON kernels. float64x2 registers are half the AVX2 width, so the
// four-lane layout of the scalar reference is emulated with two
// accumulators; the combine order (l0 + l1) + (l2 + l3) and the absence of
// FMA keep results bit-identical to the other backends.

#if defined(__aarch64__)

#include <arm_neon.h>

#include <cstddef>

namespace gem::kernels::detail {

double dot_neon(const double* a, const double* b, std::size_t n) noexcept {
  float64x2_t acc01 = vdupq_n_f64(0.0);  // lanes 0,1
  float64x2_t acc23 = vdupq_n_f64(0.0);  // lanes 2,3
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc01 = vaddq_f64(acc01, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    acc23 = vaddq_f64(acc23,
                      vmulq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2)));
  }
  const double s01 = vpaddd_f64(acc01);  // l0 + l1
  const double s23 = vpaddd_f64(acc23);  // l2 + l3
  double r = s01 + s23;
  for (; i < n; ++i) r += a[i] * b[i];
  return r;
}

void axpy_neon(double a, const double* x, double* y, std::size_t n) noexcept {
  const float64x2_t av = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t xv = vld1q_f64(x + i);
    const float64x2_t yv = vld1q_f64(y + i);
    vst1q_f64(y + i, vaddq_f64(yv, vmulq_f64(av, xv)));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void scale_neon(double a, double* x, std::size_t n) noexcept {
  const float64x2_t av = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(x + i, vmulq_f64(av, vld1q_f64(x + i)));
  }
  for (; i < n; ++i) x[i] *= a;
}

}  // namespace gem::kernels::detail

#endif  // __aarch64__

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

#ifndef GEM_KERNELS_HPP
#define GEM_KERNELS_HPP

#include <cstddef>

// Dense double-precision kernels behind the linear algebra layer.
//
// Every backend commits to one accumulation contract so that results are
// bit-identical no matter which backend runs:
//   * reductions keep four independent lanes, lane l accumulating elements
//     i with i % 4 == l over the blocked prefix, combined as
//     (l0 + l1) + (l2 + l3), then the remaining tail elements are folded in
//     one at a time in index order;
//   * no fused multiply-add anywhere (each product is rounded before the
//     add; the build also disables FP contraction).
// The AVX2 and NEON variants reproduce this order exactly, so the
// equivalence tests can require exact equality, and a run replays
// identically whether or not SIMD is available.

namespace gem::kernels {

enum class Backend { scalar, avx2, neon };

/// Backend picked at startup (CPU detection, overridable with the
/// GEM_KERNELS environment variable set to "scalar", "avx2" or "neon").
Backend active_backend();
const char* backend_name();

/// Force a backend, for tests. Returns false if it is unavailable on this
/// host (the active backend is then left unchanged).
bool set_backend(Backend b) noexcept;

/// Sum of a[i] * b[i].
double dot(const double* a, const double* b, std::size_t n) noexcept;

/// y[i] += a * x[i].
void axpy(double a, const double* x, double* y, std::size_t n) noexcept;

/// x[i] *= a.
void scale(double a, double* x, std::size_t n) noexcept;

namespace detail {
// Direct entry points, exposed so equivalence tests can compare backends
// without flipping global state.
double dot_scalar(const double* a, const double* b, std::size_t n) noexcept;
void axpy_scalar(double a, const double* x, double* y, std::size_t n) noexcept;
void scale_scalar(double a, double* x, std::size_t n) noexcept;
#if defined(__x86_64__) || defined(_M_X64)
double dot_avx2(const double* a, const double* b, std::size_t n) noexcept;
void axpy_avx2(double a, const double* x, double* y, std::size_t n) noexcept;
void scale_avx2(double a, double* x, std::size_t n) noexcept;
#endif
#if defined(__aarch64__)
double dot_neon(const double* a, const double* b, std::size_t n) noexcept;
void axpy_neon(double a, const double* x, double* y, std::size_t n) noexcept;
void scale_neon(double a, double* x, std::size_t n) noexcept;
#endif
}  // namespace detail

}  // namespace gem::kernels

#endif  // GEM_KERNELS_HPP

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

#include "gem/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace gem::kernels {

namespace detail {

double dot_scalar(const double* a, const double* b, std::size_t n) noexcept {
  double l0 = 0.0, l1 = 0.0, l2 = 0.0, l3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    l0 += a[i] * b[i];
    l1 += a[i + 1] * b[i + 1];
    l2 += a[i + 2] * b[i + 2];
    l3 += a[i + 3] * b[i + 3];
  }
  double r = (l0 + l1) + (l2 + l3);
  for (; i < n; ++i) r += a[i] * b[i];
  return r;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) noexcept {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale_scalar(double a, double* x, std::size_t n) noexcept {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

}  // namespace detail

namespace {

struct Ops {
  double (*dot)(const double*, const double*, std::size_t) noexcept;
  void (*axpy)(double, const double*, double*, std::size_t) noexcept;
  void (*scale)(double, double*, std::size_t) noexcept;
  Backend backend;
};

constexpr Ops kScalarOps{detail::dot_scalar, detail::axpy_scalar,
                         detail::scale_scalar, Backend::scalar};

#if defined(__x86_64__) || defined(_M_X64)
constexpr Ops kAvx2Ops{detail::dot_avx2, detail::axpy_avx2,
                       detail::scale_avx2, Backend::avx2};
#endif
#if defined(__aarch64__)
constexpr Ops kNeonOps{detail::dot_neon, detail::axpy_neon,
                       detail::scale_neon, Backend::neon};
#endif

bool backend_available(Backend b) noexcept {
  switch (b) {
    case Backend::scalar:
      return true;
    case Backend::avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2") != 0;
#else
      return false;
#endif
    case Backend::neon:
#if defined(__aarch64__)
      return true;  // mandatory on aarch64
#else
      return false;
#endif
  }
  return false;
}

const Ops* ops_for(Backend b) noexcept {
  switch (b) {
    case Backend::scalar:
      return &kScalarOps;
#if defined(__x86_64__) || defined(_M_X64)
    case Backend::avx2:
      return &kAvx2Ops;
#endif
#if defined(__aarch64__)
    case Backend::neon:
      return &kNeonOps;
#endif
    default:
      return &kScalarOps;
  }
}

const Ops* detect() noexcept {
  if (const char* env = std::getenv("GEM_KERNELS")) {
    if (std::strcmp(env, "scalar") == 0) return &kScalarOps;
#if defined(__x86_64__) || defined(_M_X64)
    if (std::strcmp(env, "avx2") == 0 && backend_available(Backend::avx2))
      return &kAvx2Ops;
#endif
#if defined(__aarch64__)
    if (std::strcmp(env, "neon") == 0) return &kNeonOps;
#endif
  }
#if defined(__x86_64__) || defined(_M_X64)
  if (backend_available(Backend::avx2)) return &kAvx2Ops;
#endif
#if defined(__aarch64__)
  return &kNeonOps;
#endif
  return &kScalarOps;
}

const Ops* g_ops = detect();

}  // namespace

Backend active_backend() { return g_ops->backend; }

const char* backend_name() {
  switch (g_ops->backend) {
    case Backend::avx2:
      return "avx2";
    case Backend::neon:
      return "neon";
    default:
      return "scalar";
  }
}

bool set_backend(Backend b) noexcept {
  if (!backend_available(b)) return false;
  g_ops = ops_for(b);
  return true;
}

double dot(const double* a, const double* b, std::size_t n) noexcept {
  return g_ops->dot(a, b, n);
}

void axpy(double a, const double* x, double* y, std::size_t n) noexcept {
  g_ops->axpy(a, x, y, n);
}

void scale(double a, double* x, std::size_t n) noexcept {
  g_ops->scale(a, x, n);
}

}  // namespace gem::kernels

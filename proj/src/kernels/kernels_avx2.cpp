// Copyright 2026 The Lactose Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lactose/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define LACTOSE_HAVE_AVX2_VARIANT 1
#include <immintrin.h>
#endif

namespace lactose::kernels {

#if defined(LACTOSE_HAVE_AVX2_VARIANT)
namespace {

#define LACTOSE_AVX2 __attribute__((target("avx2")))

// Four output rows per iteration; each lane walks its own row left to right,
// so every lane performs exactly the scalar accumulation sequence.
LACTOSE_AVX2 void matvec_avx2(const double* w, const double* x,
                              const double* b, double* y, std::size_t rows,
                              std::size_t cols) {
  const auto stride = static_cast<long long>(cols);
  const __m256i offsets = _mm256_set_epi64x(3 * stride, 2 * stride, stride, 0);
  std::size_t r = 0;
  for (; r + 4 <= rows; r += 4) {
    const double* base = w + r * cols;
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t c = 0; c < cols; ++c) {
      const __m256d wc = _mm256_i64gather_pd(base + c, offsets, 8);
      acc = _mm256_add_pd(acc, _mm256_mul_pd(wc, _mm256_set1_pd(x[c])));
    }
    _mm256_storeu_pd(y + r, _mm256_add_pd(acc, _mm256_loadu_pd(b + r)));
  }
  for (; r < rows; ++r) {
    const double* row = w + r * cols;
    double acc = 0.0;
    for (std::size_t c = 0; c < cols; ++c) acc = acc + row[c] * x[c];
    y[r] = acc + b[r];
  }
}

LACTOSE_AVX2 void matvec_t_avx2(const double* w, const double* d, double* y,
                                std::size_t rows, std::size_t cols) {
  for (std::size_t c = 0; c < cols; ++c) y[c] = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = w + r * cols;
    const __m256d dr = _mm256_set1_pd(d[r]);
    std::size_t c = 0;
    for (; c + 4 <= cols; c += 4) {
      const __m256d prod = _mm256_mul_pd(_mm256_loadu_pd(row + c), dr);
      _mm256_storeu_pd(y + c, _mm256_add_pd(_mm256_loadu_pd(y + c), prod));
    }
    for (; c < cols; ++c) y[c] = y[c] + row[c] * d[r];
  }
}

LACTOSE_AVX2 void outer_avx2(const double* d, const double* a, double* g,
                             std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    double* row = g + r * cols;
    const __m256d dr = _mm256_set1_pd(d[r]);
    std::size_t c = 0;
    for (; c + 4 <= cols; c += 4)
      _mm256_storeu_pd(row + c, _mm256_mul_pd(dr, _mm256_loadu_pd(a + c)));
    for (; c < cols; ++c) row[c] = d[r] * a[c];
  }
}

LACTOSE_AVX2 void sgd_update_avx2(double* p, const double* g, double lr,
                                  std::size_t n) {
  const __m256d vlr = _mm256_set1_pd(lr);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d step = _mm256_mul_pd(vlr, _mm256_loadu_pd(g + i));
    _mm256_storeu_pd(p + i, _mm256_sub_pd(_mm256_loadu_pd(p + i), step));
  }
  for (; i < n; ++i) p[i] = p[i] - lr * g[i];
}

LACTOSE_AVX2 void adam_update_avx2(double* p, double* m, double* v,
                                   const double* g, const AdamCoefficients& k,
                                   std::size_t n) {
  const double one_minus_b1 = 1.0 - k.beta1;
  const double one_minus_b2 = 1.0 - k.beta2;
  const __m256d b1 = _mm256_set1_pd(k.beta1);
  const __m256d b2 = _mm256_set1_pd(k.beta2);
  const __m256d c1 = _mm256_set1_pd(one_minus_b1);
  const __m256d c2 = _mm256_set1_pd(one_minus_b2);
  const __m256d bc1 = _mm256_set1_pd(k.bias_correction1);
  const __m256d bc2 = _mm256_set1_pd(k.bias_correction2);
  const __m256d lr = _mm256_set1_pd(k.lr);
  const __m256d eps = _mm256_set1_pd(k.eps);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d gi = _mm256_loadu_pd(g + i);
    const __m256d mi = _mm256_add_pd(_mm256_mul_pd(b1, _mm256_loadu_pd(m + i)),
                                     _mm256_mul_pd(c1, gi));
    const __m256d vi = _mm256_add_pd(
        _mm256_mul_pd(b2, _mm256_loadu_pd(v + i)),
        _mm256_mul_pd(_mm256_mul_pd(c2, gi), gi));
    _mm256_storeu_pd(m + i, mi);
    _mm256_storeu_pd(v + i, vi);
    const __m256d m_hat = _mm256_div_pd(mi, bc1);
    const __m256d v_hat = _mm256_div_pd(vi, bc2);
    const __m256d step = _mm256_div_pd(
        _mm256_mul_pd(lr, m_hat), _mm256_add_pd(_mm256_sqrt_pd(v_hat), eps));
    _mm256_storeu_pd(p + i, _mm256_sub_pd(_mm256_loadu_pd(p + i), step));
  }
  // Tail goes through the scalar reference so both paths share one formula.
  if (i < n)
    scalar_kernels().adam_update(p + i, m + i, v + i, g + i, k, n - i);
}

#undef LACTOSE_AVX2

}  // namespace

const KernelTable* avx2_kernels() {
  static const bool supported = __builtin_cpu_supports("avx2");
  static const KernelTable table{
      Backend::kAvx2, matvec_avx2,     matvec_t_avx2,
      outer_avx2,     sgd_update_avx2, adam_update_avx2,
  };
  return supported ? &table : nullptr;
}

#else

const KernelTable* avx2_kernels() { return nullptr; }

#endif

}  // namespace lactose::kernels

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

#if defined(__aarch64__)
#include <arm_neon.h>
#endif

namespace lactose::kernels {

#if defined(__aarch64__)
namespace {

// Two output rows per iteration, lanes accumulate in scalar order.
void matvec_neon(const double* w, const double* x, const double* b, double* y,
                 std::size_t rows, std::size_t cols) {
  std::size_t r = 0;
  for (; r + 2 <= rows; r += 2) {
    const double* row0 = w + r * cols;
    const double* row1 = row0 + cols;
    float64x2_t acc = vdupq_n_f64(0.0);
    for (std::size_t c = 0; c < cols; ++c) {
      const float64x2_t wc = vcombine_f64(vld1_f64(row0 + c), vld1_f64(row1 + c));
      acc = vaddq_f64(acc, vmulq_f64(wc, vdupq_n_f64(x[c])));
    }
    vst1q_f64(y + r, vaddq_f64(acc, vld1q_f64(b + r)));
  }
  for (; r < rows; ++r) {
    const double* row = w + r * cols;
    double acc = 0.0;
    for (std::size_t c = 0; c < cols; ++c) acc = acc + row[c] * x[c];
    y[r] = acc + b[r];
  }
}

void matvec_t_neon(const double* w, const double* d, double* y,
                   std::size_t rows, std::size_t cols) {
  for (std::size_t c = 0; c < cols; ++c) y[c] = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = w + r * cols;
    const float64x2_t dr = vdupq_n_f64(d[r]);
    std::size_t c = 0;
    for (; c + 2 <= cols; c += 2)
      vst1q_f64(y + c,
                vaddq_f64(vld1q_f64(y + c), vmulq_f64(vld1q_f64(row + c), dr)));
    for (; c < cols; ++c) y[c] = y[c] + row[c] * d[r];
  }
}

void outer_neon(const double* d, const double* a, double* g, std::size_t rows,
                std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    double* row = g + r * cols;
    const float64x2_t dr = vdupq_n_f64(d[r]);
    std::size_t c = 0;
    for (; c + 2 <= cols; c += 2)
      vst1q_f64(row + c, vmulq_f64(dr, vld1q_f64(a + c)));
    for (; c < cols; ++c) row[c] = d[r] * a[c];
  }
}

void sgd_update_neon(double* p, const double* g, double lr, std::size_t n) {
  const float64x2_t vlr = vdupq_n_f64(lr);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(p + i, vsubq_f64(vld1q_f64(p + i), vmulq_f64(vlr, vld1q_f64(g + i))));
  for (; i < n; ++i) p[i] = p[i] - lr * g[i];
}

void adam_update_neon(double* p, double* m, double* v, const double* g,
                      const AdamCoefficients& k, std::size_t n) {
  const float64x2_t b1 = vdupq_n_f64(k.beta1);
  const float64x2_t b2 = vdupq_n_f64(k.beta2);
  const float64x2_t c1 = vdupq_n_f64(1.0 - k.beta1);
  const float64x2_t c2 = vdupq_n_f64(1.0 - k.beta2);
  const float64x2_t bc1 = vdupq_n_f64(k.bias_correction1);
  const float64x2_t bc2 = vdupq_n_f64(k.bias_correction2);
  const float64x2_t lr = vdupq_n_f64(k.lr);
  const float64x2_t eps = vdupq_n_f64(k.eps);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t gi = vld1q_f64(g + i);
    const float64x2_t mi =
        vaddq_f64(vmulq_f64(b1, vld1q_f64(m + i)), vmulq_f64(c1, gi));
    const float64x2_t vi = vaddq_f64(vmulq_f64(b2, vld1q_f64(v + i)),
                                     vmulq_f64(vmulq_f64(c2, gi), gi));
    vst1q_f64(m + i, mi);
    vst1q_f64(v + i, vi);
    const float64x2_t step =
        vdivq_f64(vmulq_f64(lr, vdivq_f64(mi, bc1)),
                  vaddq_f64(vsqrtq_f64(vdivq_f64(vi, bc2)), eps));
    vst1q_f64(p + i, vsubq_f64(vld1q_f64(p + i), step));
  }
  if (i < n)
    scalar_kernels().adam_update(p + i, m + i, v + i, g + i, k, n - i);
}

}  // namespace

const KernelTable* neon_kernels() {
  static const KernelTable table{
      Backend::kNeon, matvec_neon,     matvec_t_neon,
      outer_neon,     sgd_update_neon, adam_update_neon,
  };
  return &table;
}

#else

const KernelTable* neon_kernels() { return nullptr; }

#endif

}  // namespace lactose::kernels

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

#include <cmath>

#include "lactose/kernels.hpp"

namespace lactose::kernels {
namespace {

void matvec_scalar(const double* w, const double* x, const double* b,
                   double* y, std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = w + r * cols;
    double acc = 0.0;
    for (std::size_t c = 0; c < cols; ++c) acc = acc + row[c] * x[c];
    y[r] = acc + b[r];
  }
}

void matvec_t_scalar(const double* w, const double* d, double* y,
                     std::size_t rows, std::size_t cols) {
  for (std::size_t c = 0; c < cols; ++c) y[c] = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = w + r * cols;
    const double dr = d[r];
    for (std::size_t c = 0; c < cols; ++c) y[c] = y[c] + row[c] * dr;
  }
}

void outer_scalar(const double* d, const double* a, double* g,
                  std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    double* row = g + r * cols;
    for (std::size_t c = 0; c < cols; ++c) row[c] = d[r] * a[c];
  }
}

void sgd_update_scalar(double* p, const double* g, double lr, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) p[i] = p[i] - lr * g[i];
}

void adam_update_scalar(double* p, double* m, double* v, const double* g,
                        const AdamCoefficients& k, std::size_t n) {
  const double one_minus_b1 = 1.0 - k.beta1;
  const double one_minus_b2 = 1.0 - k.beta2;
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = k.beta1 * m[i] + one_minus_b1 * g[i];
    v[i] = k.beta2 * v[i] + one_minus_b2 * g[i] * g[i];
    const double m_hat = m[i] / k.bias_correction1;
    const double v_hat = v[i] / k.bias_correction2;
    p[i] = p[i] - (k.lr * m_hat) / (std::sqrt(v_hat) + k.eps);
  }
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{
      Backend::kScalar, matvec_scalar,      matvec_t_scalar,
      outer_scalar,     sgd_update_scalar,  adam_update_scalar,
  };
  return table;
}

}  // namespace lactose::kernels

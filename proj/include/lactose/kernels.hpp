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

#pragma once

#include <cstddef>
#include <string_view>

// Dense arithmetic used by the forward pass, backward pass and optimizers.
//
// Every kernel has a scalar reference implementation and, where the target
// supports it, a SIMD variant (AVX2 on x86-64, NEON on AArch64). The SIMD
// variants vectorize across independent outputs only and never reassociate
// a sum, so every variant produces bit-identical results to the scalar
// reference. Banks trained on different machines therefore match byte for
// byte as long as the inputs do.
//
// Canonical operation order (shared by all variants):
//   matvec:       y[r] = (((0 + w[r,0]*x[0]) + w[r,1]*x[1]) + ...) + b[r]
//   matvec_t:     y[c] = ((0 + w[0,c]*d[0]) + w[1,c]*d[1]) + ...
//   outer:        g[r,c] = d[r] * a[c]
//   sgd_update:   p[i] = p[i] - lr * g[i]
//   adam_update:  m = b1*m + (1-b1)*g;  v = b2*v + ((1-b2)*g)*g;
//                 p = p - (lr * (m / bc1)) / (sqrt(v / bc2) + eps)
namespace lactose::kernels {

enum class Backend { kScalar, kAvx2, kNeon };

struct AdamCoefficients {
  double lr;
  double beta1;
  double beta2;
  double eps;
  double bias_correction1;  // 1 - beta1^t
  double bias_correction2;  // 1 - beta2^t
};

struct KernelTable {
  Backend backend;

  // w is rows x cols, row-major.
  void (*matvec)(const double* w, const double* x, const double* b,
                 double* y, std::size_t rows, std::size_t cols);
  void (*matvec_t)(const double* w, const double* d, double* y,
                   std::size_t rows, std::size_t cols);
  void (*outer)(const double* d, const double* a, double* g, std::size_t rows,
                std::size_t cols);

  void (*sgd_update)(double* p, const double* g, double lr, std::size_t n);
  void (*adam_update)(double* p, double* m, double* v, const double* g,
                      const AdamCoefficients& c, std::size_t n);
};

const KernelTable& scalar_kernels();
// Null when the variant was not compiled in or the CPU lacks the feature.
const KernelTable* avx2_kernels();
const KernelTable* neon_kernels();

// The table selected for this process. On first use the best supported
// backend is picked, unless LACTOSE_KERNELS=scalar|avx2|neon says otherwise.
const KernelTable& active();

// Overrides the active table. Throws ValidationError if the backend is not
// available on this machine.
void set_backend(Backend backend);

std::string_view backend_name(Backend backend);

}  // namespace lactose::kernels

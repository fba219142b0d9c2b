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

#include <doctest.h>

#include <vector>

#include "lactose/bank.hpp"
#include "lactose/error.hpp"
#include "lactose/kernels.hpp"
#include "lactose/trainer.hpp"
#include "test_util.hpp"

using namespace lactose;
using lactose::kernels::KernelTable;

namespace {

std::vector<const KernelTable*> simd_tables() {
  std::vector<const KernelTable*> out;
  if (auto* t = kernels::avx2_kernels()) out.push_back(t);
  if (auto* t = kernels::neon_kernels()) out.push_back(t);
  return out;
}

// Restores the active backend on scope exit.
struct BackendGuard {
  kernels::Backend saved = kernels::active().backend;
  ~BackendGuard() { kernels::set_backend(saved); }
};

}  // namespace

TEST_CASE("SIMD kernels are bit-identical to the scalar reference") {
  const auto& ref = kernels::scalar_kernels();
  const auto tables = simd_tables();
  if (tables.empty()) MESSAGE("no SIMD backend on this machine; scalar only");

  SplitMix64 rng(3);
  for (const KernelTable* simd : tables) {
    CAPTURE(kernels::backend_name(simd->backend));
    for (int trial = 0; trial < 300; ++trial) {
      const std::size_t rows = 1 + rng.below(19);
      const std::size_t cols = 1 + rng.below(19);
      const auto w = testing::random_vector(rng, rows * cols);
      const auto x = testing::random_vector(rng, cols);
      const auto b = testing::random_vector(rng, rows);
      const auto d = testing::random_vector(rng, rows);

      std::vector<double> y0(rows), y1(rows);
      ref.matvec(w.data(), x.data(), b.data(), y0.data(), rows, cols);
      simd->matvec(w.data(), x.data(), b.data(), y1.data(), rows, cols);
      CHECK(bit_equal(y0, y1));

      std::vector<double> t0(cols, 7.0), t1(cols, -7.0);
      ref.matvec_t(w.data(), d.data(), t0.data(), rows, cols);
      simd->matvec_t(w.data(), d.data(), t1.data(), rows, cols);
      CHECK(bit_equal(t0, t1));

      std::vector<double> g0(rows * cols), g1(rows * cols);
      ref.outer(d.data(), x.data(), g0.data(), rows, cols);
      simd->outer(d.data(), x.data(), g1.data(), rows, cols);
      CHECK(bit_equal(g0, g1));

      const std::size_t n = rows * cols;
      auto p0 = testing::random_vector(rng, n);
      auto p1 = p0;
      const auto grad = testing::random_vector(rng, n);
      ref.sgd_update(p0.data(), grad.data(), 0.037, n);
      simd->sgd_update(p1.data(), grad.data(), 0.037, n);
      CHECK(bit_equal(p0, p1));

      auto m0 = testing::random_vector(rng, n, -0.1, 0.1);
      auto v0 = testing::random_vector(rng, n, 0.0, 0.1);
      auto m1 = m0;
      auto v1 = v0;
      const kernels::AdamCoefficients c{0.01, 0.9, 0.999, 1e-8, 1 - 0.9 * 0.9,
                                        1 - 0.999 * 0.999};
      ref.adam_update(p0.data(), m0.data(), v0.data(), grad.data(), c, n);
      simd->adam_update(p1.data(), m1.data(), v1.data(), grad.data(), c, n);
      CHECK(bit_equal(p0, p1));
      CHECK(bit_equal(m0, m1));
      CHECK(bit_equal(v0, v1));
    }
  }
}

TEST_CASE("scalar matvec follows the documented accumulation order") {
  // 0.1 + 0.2 + 0.3 differs from 0.1 + (0.2 + 0.3) in binary64.
  const std::vector<double> w{1, 1, 1};
  const std::vector<double> x{0.1, 0.2, 0.3};
  const std::vector<double> b{0};
  double y = 0;
  kernels::scalar_kernels().matvec(w.data(), x.data(), b.data(), &y, 1, 3);
  CHECK(y == ((0.0 + 0.1) + 0.2) + 0.3);
}

TEST_CASE("training is backend-independent byte for byte") {
  const auto tables = simd_tables();
  if (tables.empty()) return;
  BackendGuard guard;

  SplitMix64 rng(17);
  std::vector<std::size_t> widths{2, 8, 5, 3};
  std::vector<Activation> acts{Activation::kTanh, Activation::kReLU, Activation::kLinear};
  const auto layout = ModelLayout::chain(widths, acts);
  const ConditionArray cond({-0.5, 0.7});
  const Dataset data = testing::random_dataset(rng, 60, 2, 3);
  OptimizerConfig adam;
  adam.kind = OptimizerKind::kAdam;

  auto run = [&](kernels::Backend b) {
    kernels::set_backend(b);
    auto bank = bank_init(layout, 3, InitMode::kIndependent, 5, adam);
    MLPModel model(layout);
    train(model, bank, cond, data, {3, 99, LossKind::kMSE});
    return bank;
  };
  const auto reference = run(kernels::Backend::kScalar);
  for (const KernelTable* t : tables) {
    CAPTURE(kernels::backend_name(t->backend));
    CHECK(run(t->backend).bit_equal(reference));
  }
}

TEST_CASE("backend selection") {
  BackendGuard guard;
  kernels::set_backend(kernels::Backend::kScalar);
  CHECK(kernels::active().backend == kernels::Backend::kScalar);
  if (!kernels::neon_kernels())
    CHECK_THROWS_AS(kernels::set_backend(kernels::Backend::kNeon), ValidationError);
  CHECK(kernels::backend_name(kernels::Backend::kAvx2) == "avx2");
}

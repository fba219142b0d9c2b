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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "lactose/bank.hpp"
#include "lactose/error.hpp"
#include "test_util.hpp"

using namespace lactose;
namespace fs = std::filesystem;

namespace {

ModelLayout small_layout() {
  std::vector<std::size_t> widths{2, 4, 1};
  std::vector<Activation> acts{Activation::kTanh, Activation::kLinear};
  return ModelLayout::chain(widths, acts);
}

OptimizerConfig adam_config() {
  OptimizerConfig c;
  c.kind = OptimizerKind::kAdam;
  c.learning_rate = 0.05;
  return c;
}

// Bank with every branch perturbed by a few optimizer steps so moments and
// step counts are non-trivial.
ParameterBank random_bank(SplitMix64& rng, const OptimizerConfig& opt) {
  const auto layout = testing::random_layout(rng, 6, 3);
  const std::size_t n = 1 + rng.below(4);
  auto bank = bank_init(layout, n, rng.below(2) ? InitMode::kShared : InitMode::kIndependent,
                        rng.next(), opt);
  MLPModel model(layout);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t steps = rng.below(4);
    for (std::size_t s = 0; s < steps; ++s) {
      auto state = bank.optimizer_state({i});
      FlatParams g = zero_params(layout);
      for (double& v : g.values) v = rng.uniform(-1, 1);
      inject_params(model, apply_update(state, bank.params({i}), g));
      store_branch(bank, {i}, model);
      bank.set_optimizer_state({i}, state);
    }
  }
  return bank;
}

std::string error_of(const fs::path& p) {
  try {
    load_bank(p);
  } catch (const FormatError& e) {
    return e.what();
  }
  return "loaded";
}

void write_bytes(const fs::path& p, const std::string& bytes) {
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  f << bytes;
}

}  // namespace

TEST_CASE("bank_init: shared, independent and single-branch banks") {
  const auto layout = small_layout();
  const OptimizerConfig sgd;

  const auto shared = bank_init(layout, 3, InitMode::kShared, 7, sgd);
  CHECK(shared.params({0}).bit_equal(shared.params({1})));
  CHECK(shared.params({1}).bit_equal(shared.params({2})));

  const auto indep = bank_init(layout, 2, InitMode::kIndependent, 7, sgd);
  CHECK_FALSE(indep.params({0}).bit_equal(indep.params({1})));
  CHECK(indep.bit_equal(bank_init(layout, 2, InitMode::kIndependent, 7, sgd)));
  CHECK(indep.params({0}).bit_equal(shared.params({0})));

  const auto single = bank_init(layout, 1, InitMode::kIndependent, 7, sgd);
  CHECK(single.branch_count() == 1);
  CHECK(single.params({0}).bit_equal(
      init_params(layout, branch_init_seed(InitMode::kIndependent, 7, 0))));

  CHECK_THROWS_AS(bank_init(layout, 0, InitMode::kShared, 7, sgd), ValidationError);
}

TEST_CASE("load_branch / store_branch") {
  const auto layout = small_layout();
  auto bank = bank_init(layout, 3, InitMode::kIndependent, 1, OptimizerConfig{});
  MLPModel model(layout);

  load_branch(bank, {1}, model);
  CHECK(extract_params(model).bit_equal(bank.params({1})));

  load_branch(bank, {0}, model);
  const auto first = extract_params(model);
  load_branch(bank, {1}, model);
  load_branch(bank, {0}, model);
  CHECK(extract_params(model).bit_equal(first));

  CHECK_THROWS_AS(load_branch(bank, {3}, model), IndexError);
  CHECK_THROWS_AS(store_branch(bank, {3}, model), IndexError);

  SUBCASE("store then load leaves the model unchanged") {
    inject_params(model, init_params(layout, 555));
    const auto snapshot = extract_params(model);
    store_branch(bank, {2}, model);
    load_branch(bank, {2}, model);
    CHECK(extract_params(model).bit_equal(snapshot));
  }
  SUBCASE("store touches only its branch") {
    const auto before = bank;
    inject_params(model, init_params(layout, 556));
    store_branch(bank, {1}, model);
    CHECK(bank.params({0}).bit_equal(before.params({0})));
    CHECK(bank.params({2}).bit_equal(before.params({2})));
    CHECK(bank.optimizer_state({0}).bit_equal(before.optimizer_state({0})));
    CHECK(bank.optimizer_state({2}).bit_equal(before.optimizer_state({2})));
    CHECK(bank.params({1}).bit_equal(extract_params(model)));
  }
  SUBCASE("single-branch store equals the model snapshot") {
    auto one = bank_init(layout, 1, InitMode::kShared, 2, OptimizerConfig{});
    inject_params(model, init_params(layout, 557));
    store_branch(one, {0}, model);
    CHECK(one.params({0}).bit_equal(extract_params(model)));
  }
  SUBCASE("layout mismatch") {
    std::vector<std::size_t> widths{2, 3, 1};
    std::vector<Activation> acts{Activation::kTanh, Activation::kLinear};
    MLPModel other(ModelLayout::chain(widths, acts));
    CHECK_THROWS_AS(load_branch(bank, {0}, other), ShapeError);
    CHECK_THROWS_AS(store_branch(bank, {0}, other), ShapeError);
  }
}

TEST_CASE("apply_update: SGD hand arithmetic and zero gradients") {
  ModelLayout one{1, {{1, 1, Activation::kLinear}}};
  FlatParams theta{one, {1.0, 0.5}};
  FlatParams g{one, {2.0, 0.0}};
  OptimizerConfig sgd;
  sgd.learning_rate = 0.1;
  auto state = OptimizerState::fresh(sgd, 2);
  const auto next = apply_update(state, theta, g);
  CHECK(next.values[0] == 1.0 - 0.1 * 2.0);
  CHECK(next.values[0] == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(next.values[1] == 0.5);
  CHECK(state.step_count == 1);

  const FlatParams zero = zero_params(one);
  auto s2 = OptimizerState::fresh(sgd, 2);
  CHECK(apply_update(s2, theta, zero).bit_equal(theta));
  auto s3 = OptimizerState::fresh(adam_config(), 2);
  CHECK(apply_update(s3, theta, zero).bit_equal(theta));
  CHECK(s3.step_count == 1);
}

TEST_CASE("apply_update: Adam matches the textbook recurrence on a quadratic") {
  // f(theta) = 0.5 * sum a_i theta_i^2, gradient a_i * theta_i.
  const std::vector<double> curvature{1.0, 3.0, 0.25, 10.0, 0.5};
  ModelLayout layout{1, {{1, 4, Activation::kLinear}, {4, 1, Activation::kLinear}}};
  REQUIRE(layout.parameter_count() == 13);
  std::vector<double> start(13);
  for (std::size_t i = 0; i < start.size(); ++i)
    start[i] = std::sin(1.0 + static_cast<double>(i));
  auto grad_of = [&](const std::vector<double>& th) {
    std::vector<double> g(th.size());
    for (std::size_t i = 0; i < th.size(); ++i) g[i] = curvature[i % 5] * th[i];
    return g;
  };

  const OptimizerConfig cfg = adam_config();
  auto state = OptimizerState::fresh(cfg, 13);
  FlatParams theta{layout, start};

  // Oracle: Kingma & Ba's step-size form,
  //   alpha_t = alpha * sqrt(1 - b2^t) / (1 - b1^t)
  //   theta  -= alpha_t * m / (sqrt(v) + eps * sqrt(1 - b2^t))
  std::vector<double> ref = start, m(13, 0.0), v(13, 0.0);
  for (int t = 1; t <= 3; ++t) {
    const auto g_ref = grad_of(ref);
    const double alpha_t = cfg.learning_rate * std::sqrt(1 - std::pow(cfg.beta2, t)) /
                           (1 - std::pow(cfg.beta1, t));
    const double eps_hat = cfg.epsilon * std::sqrt(1 - std::pow(cfg.beta2, t));
    for (std::size_t i = 0; i < ref.size(); ++i) {
      m[i] = cfg.beta1 * m[i] + (1 - cfg.beta1) * g_ref[i];
      v[i] = cfg.beta2 * v[i] + (1 - cfg.beta2) * g_ref[i] * g_ref[i];
      ref[i] -= alpha_t * m[i] / (std::sqrt(v[i]) + eps_hat);
    }

    theta = apply_update(state, theta, FlatParams{layout, grad_of(theta.values)});
    CHECK(state.step_count == static_cast<std::uint64_t>(t));
    for (std::size_t i = 0; i < ref.size(); ++i) {
      CHECK(std::fabs(theta.values[i] - ref[i]) < 1e-12);
      CHECK(std::fabs(state.first_moment[i] - m[i]) < 1e-12);
      CHECK(std::fabs(state.second_moment[i] - v[i]) < 1e-12);
    }
  }
}

TEST_CASE("apply_update: non-finite gradient is rejected without side effects") {
  ModelLayout one{1, {{1, 2, Activation::kLinear}}};
  FlatParams theta{one, {1, 2, 3, 4}};
  FlatParams g{one, {0.1, 0.2, NAN, 0.4}};
  auto state = OptimizerState::fresh(adam_config(), 4);
  const auto before = state;
  try {
    apply_update(state, theta, g);
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("index 2") != std::string::npos);
  }
  CHECK(state.bit_equal(before));
  FlatParams wrong{one, {1, 2, 3}};
  CHECK_THROWS_AS(apply_update(state, theta, wrong), ShapeError);
}

TEST_CASE("save_bank / load_bank round trip") {
  const auto dir = testing::scratch_dir("bank_roundtrip");
  SplitMix64 rng(606);
  for (int trial = 0; trial < 20; ++trial) {
    const auto bank = random_bank(rng, trial % 2 ? adam_config() : OptimizerConfig{});
    const auto path = dir / ("b" + std::to_string(trial) + ".lact");
    save_bank(bank, path);
    const auto loaded = load_bank(path);
    CHECK(loaded.bit_equal(bank));
    // Re-saving produces identical bytes.
    const auto again = dir / "again" / path.filename();
    save_bank(loaded, again);
    CHECK(testing::slurp(again) == testing::slurp(path));
    CHECK(testing::slurp(manifest_path(again)) == testing::slurp(manifest_path(path)));
  }

  SUBCASE("conditions travel with the bank") {
    std::vector<std::size_t> widths{1, 3, 1};
    std::vector<Activation> acts{Activation::kReLU, Activation::kLinear};
    const auto bank = bank_init(ModelLayout::chain(widths, acts), 3,
                                InitMode::kShared, 1, OptimizerConfig{});
    const ConditionArray c({-0.25, 0.125});
    save_bank(bank, dir / "c.lact", &c);
    const auto file = load_bank_file(dir / "c.lact");
    REQUIRE(file.conditions.has_value());
    CHECK(*file.conditions == c);
    const ConditionArray wrong({0.0});
    CHECK_THROWS_AS(save_bank(bank, dir / "w.lact", &wrong), FormatError);
  }
}

TEST_CASE("load_bank rejects corrupted files") {
  const auto dir = testing::scratch_dir("bank_corrupt");
  SplitMix64 rng(7);
  const auto bank = random_bank(rng, adam_config());
  const auto good = dir / "good.lact";
  save_bank(bank, good);
  const std::string bytes = testing::slurp(good);
  const std::string manifest = testing::slurp(manifest_path(good));

  auto variant = [&](const std::string& name, const std::string& blob) {
    const auto p = dir / name;
    write_bytes(p, blob);
    write_bytes(manifest_path(p), manifest);
    return p;
  };

  CHECK(error_of(variant("trunc.lact", bytes.substr(0, bytes.size() - 3)))
            .find("truncated") != std::string::npos);
  CHECK(error_of(variant("trunc8.lact", bytes.substr(0, bytes.size() - 8)))
            .find("truncated") != std::string::npos);
  CHECK(error_of(variant("trunc_head.lact", bytes.substr(0, 3))).find("truncated") !=
        std::string::npos);
  CHECK(error_of(variant("empty.lact", "")).find("truncated") != std::string::npos);

  std::string magic = bytes;
  magic[0] = 'X';
  CHECK(error_of(variant("magic.lact", magic)).find("bad magic") != std::string::npos);

  std::string version = bytes;
  version[4] = static_cast<char>(kBankFormatVersion + 1);
  CHECK(error_of(variant("version.lact", version)).find("unsupported format version") !=
        std::string::npos);

  // Consistent trailer but fewer values than the manifest describes.
  std::string shorter = bytes.substr(0, 5) + bytes.substr(13, bytes.size() - 13 - 8);
  const std::uint64_t count = (shorter.size() - 5) / 8;
  for (int i = 0; i < 8; ++i) shorter.push_back(static_cast<char>((count >> (8 * i)) & 0xFF));
  CHECK(error_of(variant("short.lact", shorter)).find("manifest describes") !=
        std::string::npos);

  const auto no_manifest = dir / "lonely.lact";
  write_bytes(no_manifest, bytes);
  CHECK_THROWS_AS(load_bank(no_manifest), FormatError);
}

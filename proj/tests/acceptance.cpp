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

// Acceptance gate. Prints one PASS/FAIL line per criterion and exits nonzero
// if any criterion fails. Tolerances and time budgets are fixed here.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "lactose/bank.hpp"
#include "lactose/commands.hpp"
#include "lactose/config.hpp"
#include "lactose/error.hpp"
#include "lactose/netcore.hpp"
#include "lactose/optimizer.hpp"
#include "lactose/router.hpp"
#include "lactose/trainer.hpp"
#include "test_util.hpp"

using namespace lactose;
namespace fs = std::filesystem;

namespace {

constexpr double kGradientTolerance = 1e-5;
constexpr double kFiniteDifferenceStep = 1e-5;
constexpr double kReferenceMseCeiling = 0.02;
// Seeds for the reference experiment. Each seed drives the dataset, the
// initial parameters and the shuffle order.
constexpr std::uint64_t kReferenceSeeds[] = {1, 2, 3, 4, 5};

struct Outcome {
  bool pass = true;
  std::string detail;
};

Outcome fail(std::string detail) { return {false, std::move(detail)}; }

// C1: backward vs central finite differences.
Outcome gradient_oracle() {
  SplitMix64 rng(0xC1);
  std::size_t pairs = 0, components = 0, skipped = 0;
  double worst = 0.0;
  bool seen[3] = {false, false, false};
  while (pairs < 150) {
    const auto layout = testing::random_layout(rng, 8, 3);
    const auto model = make_model(layout, rng.next());
    const auto x = testing::random_vector(rng, layout.input_width, -2.0, 2.0);
    const auto y = testing::random_vector(rng, layout.output_width(), -2.0, 2.0);
    const auto trace = forward(model, x);
    if (testing::near_relu_kink(trace, layout, 1e-3)) {
      ++skipped;
      continue;
    }
    ++pairs;
    for (const auto& l : layout.layers) seen[static_cast<int>(l.activation)] = true;
    const auto g = backward(model, trace, y, LossKind::kMSE);
    const auto fd = testing::finite_difference_gradient(layout, extract_params(model).values,
                                                        x, y, kFiniteDifferenceStep);
    for (std::size_t i = 0; i < fd.size(); ++i) {
      ++components;
      const double e = testing::guarded_relative_error(g.values[i], fd[i]);
      worst = std::max(worst, e);
      if (!(e < kGradientTolerance)) {
        std::ostringstream s;
        s << "pair " << pairs << " component " << i << ": backward " << g.values[i]
          << " vs fd " << fd[i] << " (rel " << e << ")";
        return fail(s.str());
      }
    }
  }
  if (!(seen[0] && seen[1] && seen[2])) return fail("not every activation was exercised");
  std::ostringstream s;
  s << pairs << " pairs, " << components << " components, worst rel err " << worst
    << ", " << skipped << " kink draws resampled";
  return {true, s.str()};
}

// C2: LACTOSE bank == independent per-branch training on routed subsequences.
Outcome partition_equivalence() {
  SplitMix64 rng(0xC2);
  std::size_t runs = 0;
  for (std::size_t n = 1; n <= 3; ++n) {
    for (int adam = 0; adam < 2; ++adam) {
      for (int trial = 0; trial < 4; ++trial) {
        OptimizerConfig opt;
        opt.kind = adam ? OptimizerKind::kAdam : OptimizerKind::kSGD;
        opt.learning_rate = adam ? 0.01 : 0.05;
        const auto layout = testing::random_layout(rng, 8, 3);
        const auto data = testing::random_dataset(rng, 50, layout.input_width,
                                                  layout.output_width());
        const ConditionArray cond =
            n == 1 ? ConditionArray::single_branch()
                   : ConditionArray(testing::random_breakpoints(rng, n - 1, -2.0, 2.0),
                                    rng.below(layout.input_width));
        TrainOptions options;
        options.epochs = 3;
        if (trial % 2) options.shuffle_seed = rng.next();
        const auto mode = trial < 2 ? InitMode::kIndependent : InitMode::kShared;
        const auto verdict =
            partition_oracle(layout, cond, data, options, mode, rng.next(), opt);
        ++runs;
        if (!verdict.equal) {
          return fail("N=" + std::to_string(n) + (adam ? " adam" : " sgd") + " trial " +
                      std::to_string(trial) + ": " + verdict.first_difference);
        }
      }
    }
  }
  return {true, std::to_string(runs) + " runs byte-identical (N=1..3, sgd+adam, 3 epochs)"};
}

// C3: non-routed branches never change.
Outcome branch_isolation() {
  SplitMix64 rng(0xC3);
  const auto layout = ModelLayout::chain({2, 6, 6, 1}, {Activation::kTanh, Activation::kReLU,
                                                        Activation::kLinear});
  OptimizerConfig opt;
  opt.kind = OptimizerKind::kAdam;
  auto bank = bank_init(layout, 4, InitMode::kIndependent, rng.next(), opt);
  const ConditionArray cond({-1.0, 0.0, 1.0}, 1);
  const auto data = testing::random_dataset(rng, 200, 2, 1, -2.0, 2.0);
  MLPModel live(layout);
  std::vector<std::size_t> hits(4, 0);
  for (std::size_t step = 0; step < data.size(); ++step) {
    const ParameterBank before = bank;
    const std::size_t routed = route(cond, data[step].x).value;
    lactose_step(live, bank, cond, data[step], LossKind::kMSE);
    ++hits[routed];
    for (std::size_t b = 0; b < 4; ++b) {
      if (b == routed) {
        if (bank.optimizer_state({b}).step_count != before.optimizer_state({b}).step_count + 1)
          return fail("step " + std::to_string(step) + ": routed branch did not advance");
        continue;
      }
      if (!bank.params({b}).bit_equal(before.params({b})) ||
          !bank.optimizer_state({b}).bit_equal(before.optimizer_state({b}))) {
        return fail("step " + std::to_string(step) + ": branch " + std::to_string(b) +
                    " changed while branch " + std::to_string(routed) + " was routed");
      }
    }
  }
  for (std::size_t b = 0; b < 4; ++b)
    if (hits[b] == 0) return fail("branch " + std::to_string(b) + " was never routed");
  return {true, "200 steps, per-branch hits " + std::to_string(hits[0]) + "/" +
                    std::to_string(hits[1]) + "/" + std::to_string(hits[2]) + "/" +
                    std::to_string(hits[3])};
}

// C4: one branch is plain training.
Outcome degeneracy() {
  SplitMix64 rng(0xC4);
  std::size_t runs = 0;
  for (int trial = 0; trial < 12; ++trial) {
    const auto layout = testing::random_layout(rng, 8, 3);
    const auto data =
        testing::random_dataset(rng, 40, layout.input_width, layout.output_width());
    OptimizerConfig opt;
    opt.kind = trial % 2 ? OptimizerKind::kAdam : OptimizerKind::kSGD;
    const auto mode = trial % 3 ? InitMode::kIndependent : InitMode::kShared;
    const std::uint64_t seed = rng.next();
    TrainOptions options;
    options.epochs = 2;
    options.shuffle_seed = rng.next();

    auto bank = bank_init(layout, 1, mode, seed, opt);
    MLPModel live(layout);
    const auto lr = train(live, bank, ConditionArray::single_branch(), data, options);

    auto mono = make_model(layout, branch_init_seed(mode, seed, 0));
    auto state = OptimizerState::fresh(opt, layout.parameter_count());
    const auto mr = train_monolithic(mono, state, data, options);
    ++runs;
    if (!bank.params({0}).bit_equal(extract_params(mono)))
      return fail("trial " + std::to_string(trial) + ": parameters differ");
    if (!bank.optimizer_state({0}).bit_equal(state))
      return fail("trial " + std::to_string(trial) + ": optimizer state differs");
    if (!bit_equal(lr.step_losses, mr.step_losses))
      return fail("trial " + std::to_string(trial) + ": step losses differ");
  }
  return {true, std::to_string(runs) + " runs byte-identical (sgd+adam, shared+independent)"};
}

// C5: router totality, monotonicity and half-open boundaries, against a
// linear-scan oracle (number of breakpoints <= x).
Outcome router_properties() {
  SplitMix64 rng(0xC5);
  std::size_t probes = 0;
  auto oracle = [](const std::vector<double>& bp, double x) {
    std::size_t k = 0;
    for (double c : bp) k += c <= x ? 1 : 0;
    return k;
  };
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t k = 1 + rng.below(8);
    const double span = trial % 5 == 0 ? 1e-9 : 10.0;
    const auto bp = testing::random_breakpoints(rng, k, -span, span);
    const ConditionArray cond(bp);
    std::vector<double> xs;
    for (int i = 0; i < 40; ++i) xs.push_back(rng.uniform(-2 * span, 2 * span));
    for (double c : bp) {
      xs.push_back(c);
      xs.push_back(std::nextafter(c, -INFINITY));
      xs.push_back(std::nextafter(c, INFINITY));
      xs.push_back(c - 1e-6 * span);
      xs.push_back(c + 1e-6 * span);
    }
    xs.push_back(-INFINITY);
    xs.push_back(INFINITY);
    xs.push_back(std::numeric_limits<double>::lowest());
    xs.push_back(std::numeric_limits<double>::max());
    std::sort(xs.begin(), xs.end());
    std::size_t prev = 0;
    for (double x : xs) {
      ++probes;
      const std::size_t b = cond.route_value(x).value;
      if (b > k) return fail("branch out of range");
      if (b != oracle(bp, x)) {
        std::ostringstream s;
        s.precision(17);
        s << "x=" << x << " routed to " << b << ", expected " << oracle(bp, x);
        return fail(s.str());
      }
      if (b < prev) return fail("routing is not monotone");
      prev = b;
    }
    for (std::size_t i = 0; i < k; ++i) {
      if (cond.route_value(bp[i]).value != i + 1 ||
          cond.route_value(std::nextafter(bp[i], -INFINITY)).value != i)
        return fail("boundary C_i is not left-closed on the upper branch");
    }
    try {
      cond.route_value(std::numeric_limits<double>::quiet_NaN());
      return fail("NaN was routed");
    } catch (const RoutingError&) {
    }
  }
  return {true, std::to_string(probes) + " probes over 500 arrays, zero violations"};
}

ParameterBank random_trained_bank(SplitMix64& rng) {
  const auto layout = testing::random_layout(rng, 8, 3);
  const std::size_t n = 1 + rng.below(5);
  OptimizerConfig opt;
  opt.kind = rng.below(2) ? OptimizerKind::kAdam : OptimizerKind::kSGD;
  auto bank = bank_init(layout, n, rng.below(2) ? InitMode::kShared : InitMode::kIndependent,
                        rng.next(), opt);
  std::vector<double> bp;
  const ConditionArray cond = n == 1 ? ConditionArray::single_branch()
                                     : ConditionArray(testing::random_breakpoints(rng, n - 1));
  const auto data = testing::random_dataset(rng, 1 + rng.below(30), layout.input_width,
                                            layout.output_width(), -10.0, 10.0);
  MLPModel live(layout);
  train(live, bank, cond, data, {});
  return bank;
}

bool load_rejected(const fs::path& p, ParameterBank& target) {
  try {
    target = load_bank(p);
  } catch (const FormatError&) {
    return true;
  }
  return false;
}

// C6: save/load round trips and corruption rejection.
Outcome serialization() {
  SplitMix64 rng(0xC6);
  const auto dir = testing::scratch_dir("acceptance_bank");
  for (int i = 0; i < 100; ++i) {
    const auto bank = random_trained_bank(rng);
    const auto p = dir / ("bank" + std::to_string(i) + ".lact");
    save_bank(bank, p);
    const auto back = load_bank(p);
    if (!back.bit_equal(bank)) return fail("bank " + std::to_string(i) + " did not round-trip");
    const auto again = dir / "again" / p.filename();
    save_bank(back, again);
    if (testing::slurp(again) != testing::slurp(p) ||
        testing::slurp(manifest_path(again)) != testing::slurp(manifest_path(p)))
      return fail("bank " + std::to_string(i) + " re-saved to different bytes");
  }

  const auto original = random_trained_bank(rng);
  const auto good = dir / "good.lact";
  save_bank(original, good);
  const std::string bytes = testing::slurp(good);
  const std::string manifest = testing::slurp(manifest_path(good));
  auto corrupt = [&](const std::string& name, const std::string& blob) {
    const auto p = dir / name;
    write_text_file(p, blob);
    write_text_file(manifest_path(p), manifest);
    return p;
  };
  std::string magic = bytes;
  magic[1] = 'Z';
  std::string version = bytes;
  version[4] = static_cast<char>(kBankFormatVersion + 7);
  const std::vector<std::pair<std::string, fs::path>> cases{
      {"truncated by one byte", corrupt("t1.lact", bytes.substr(0, bytes.size() - 1))},
      {"truncated mid-values", corrupt("t2.lact", bytes.substr(0, bytes.size() / 2))},
      {"truncated header", corrupt("t3.lact", bytes.substr(0, 2))},
      {"bad magic", corrupt("magic.lact", magic)},
      {"bad version", corrupt("version.lact", version)},
  };
  for (const auto& [what, path] : cases) {
    ParameterBank target = original;
    if (!load_rejected(path, target)) return fail(what + " was accepted");
    if (!target.bit_equal(original)) return fail(what + " left partial state");
  }
  return {true, "100 banks byte-exact; truncation, bad magic and bad version rejected"};
}

ExperimentConfig reference_config(std::uint64_t seed, const fs::path& out) {
  auto cfg = load_config(fs::path(LACTOSE_SOURCE_DIR) / "configs" / "reference.json");
  cfg.init_seed = seed;
  cfg.shuffle_seed = seed;
  cfg.generator->seed = seed;
  cfg.outputs.bank = out / "bank.lact";
  cfg.outputs.report = out / "report.csv";
  cfg.outputs.compare = out / "compare.csv";
  return cfg;
}

// C7: reference experiment over the frozen seeds.
Outcome reference_experiment() {
  const auto dir = testing::scratch_dir("acceptance_reference");
  std::ostringstream s;
  bool pass = true;
  for (std::uint64_t seed : kReferenceSeeds) {
    const auto cfg = reference_config(seed, dir);
    const auto arms = commands::compare(cfg, std::nullopt);
    const double lac = arms[0].final_mse, mono = arms[1].final_mse;
    const bool ok = lac < mono && lac < kReferenceMseCeiling &&
                    arms[0].total_steps == arms[1].total_steps;
    pass = pass && ok;
    s << (seed == kReferenceSeeds[0] ? "" : "; ") << "seed " << seed << ": lactose "
      << lac << " vs monolithic " << mono;
    if (arms.size() > 2) s << " (scaled " << arms[2].final_mse << ")";
    if (!ok) s << " FAILED";
  }
  return {pass, s.str()};
}

int run(const std::string& cmd) {
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

// C8: two CLI runs of the reference config produce identical files.
Outcome determinism() {
  const auto dir = testing::scratch_dir("acceptance_determinism");
  const fs::path config = fs::path(LACTOSE_SOURCE_DIR) / "configs" / "reference.json";
  std::vector<std::string> files[2];
  for (int r = 0; r < 2; ++r) {
    const auto out = dir / ("run" + std::to_string(r));
    const std::string cmd = "LACTOSE_LOG=quiet \"" LACTOSE_CLI_PATH "\" train --config \"" +
                            config.string() + "\" --bank \"" + (out / "bank.lact").string() +
                            "\" --report \"" + (out / "report.csv").string() + "\"";
    if (run(cmd) != 0) return fail("train run " + std::to_string(r) + " failed");
    for (const char* f : {"bank.lact", "bank.lact.json", "report.csv"})
      files[r].push_back(testing::slurp(out / f));
  }
  const char* names[] = {"bank blob", "bank manifest", "report CSV"};
  for (int i = 0; i < 3; ++i) {
    if (files[0][i].empty()) return fail(std::string(names[i]) + " is empty");
    if (files[0][i] != files[1][i]) return fail(std::string(names[i]) + " differs");
  }
  return {true, "bank blob, manifest and report CSV byte-identical across runs (" +
                    std::to_string(files[0][0].size()) + " + " +
                    std::to_string(files[0][2].size()) + " bytes)"};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget_seconds;
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria{
      {"C1 gradient oracle", 10.0, gradient_oracle},
      {"C2 partition equivalence", 5.0, partition_equivalence},
      {"C3 branch isolation", 5.0, branch_isolation},
      {"C4 single-branch degeneracy", 60.0, degeneracy},
      {"C5 router properties", 60.0, router_properties},
      {"C6 serialization", 60.0, serialization},
      {"C7 reference experiment", 60.0, reference_experiment},
      {"C8 determinism", 120.0, determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = fail(std::string("unexpected exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (o.pass && secs >= c.budget_seconds) {
      o.pass = false;
      o.detail += "; over the " + std::to_string(c.budget_seconds) + " s budget";
    }
    if (!o.pass) ++failures;
    std::printf("%s %s: %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(),
                secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}

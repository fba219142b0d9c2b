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

#include "lactose/trainer.hpp"

#include <chrono>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>

#include "lactose/dataio.hpp"
#include "lactose/error.hpp"
#include "lactose/rng.hpp"

namespace lactose {
namespace {

void check_branch_counts(const ParameterBank& bank,
                         const ConditionArray& conditions) {
  if (bank.branch_count() != conditions.branch_count()) {
    throw ValidationError("conditions define " +
                          std::to_string(conditions.branch_count()) +
                          " branches but the bank holds " +
                          std::to_string(bank.branch_count()));
  }
}

// Index of the first differing double, or npos.
std::size_t first_mismatch(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i)
    if (std::memcmp(&a[i], &b[i], sizeof(double)) != 0) return i;
  return a.size() == b.size() ? std::string::npos : n;
}

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

std::vector<std::size_t> epoch_order(std::size_t n, std::size_t epoch,
                                     std::optional<std::uint64_t> shuffle_seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (!shuffle_seed || n < 2) return order;
  SplitMix64 rng(derive_seed(*shuffle_seed, epoch));
  for (std::size_t i = n - 1; i > 0; --i)
    std::swap(order[i], order[rng.below(i + 1)]);
  return order;
}

double lactose_step(MLPModel& model, ParameterBank& bank,
                    const ConditionArray& conditions, const TrainRecord& record,
                    LossKind loss_kind) {
  check_branch_counts(bank, conditions);
  const BranchIndex branch = route(conditions, record.x);
  load_branch(bank, branch, model);

  const ForwardTrace trace = forward(model, record.x);
  const double step_loss = loss(loss_kind, record.y, trace.output());
  const FlatParams grads = backward(model, trace, record.y, loss_kind);

  OptimizerState state = bank.optimizer_state(branch);
  const FlatParams updated = apply_update(state, bank.params(branch), grads);
  inject_params(model, updated);

  // Commit. Nothing below can fail for a consistent bank.
  store_branch(bank, branch, model);
  bank.set_optimizer_state(branch, std::move(state));
  return step_loss;
}

TrainReport train(MLPModel& model, ParameterBank& bank,
                  const ConditionArray& conditions,
                  std::span<const TrainRecord> data, const TrainOptions& options) {
  if (data.empty()) throw ValidationError("dataset: no records to train on");
  check_branch_counts(bank, conditions);
  const auto start = std::chrono::steady_clock::now();

  TrainReport report;
  report.branch_steps.assign(bank.branch_count(), 0);
  report.step_losses.reserve(data.size() * options.epochs);
  report.step_branches.reserve(data.size() * options.epochs);
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    for (std::size_t idx : epoch_order(data.size(), epoch, options.shuffle_seed)) {
      const TrainRecord& r = data[idx];
      const BranchIndex b = route(conditions, r.x);
      report.step_losses.push_back(
          lactose_step(model, bank, conditions, r, options.loss));
      report.step_branches.push_back(b.value);
      ++report.branch_steps[b.value];
    }
  }

  const Evaluation eval = evaluate(bank, conditions, data, options.loss);
  report.final_mse = eval.mean_loss;
  report.branch_mse = eval.branch_mean_loss;
  report.seconds = elapsed_seconds(start);
  return report;
}

TrainReport train_monolithic(MLPModel& model, OptimizerState& state,
                             std::span<const TrainRecord> data,
                             const TrainOptions& options) {
  if (data.empty()) throw ValidationError("dataset: no records to train on");
  const auto start = std::chrono::steady_clock::now();

  TrainReport report;
  report.branch_steps.assign(1, 0);
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    for (std::size_t idx : epoch_order(data.size(), epoch, options.shuffle_seed)) {
      const TrainRecord& r = data[idx];
      const ForwardTrace trace = forward(model, r.x);
      const double step_loss = loss(options.loss, r.y, trace.output());
      const FlatParams grads = backward(model, trace, r.y, options.loss);
      OptimizerState next_state = state;
      const FlatParams updated =
          apply_update(next_state, extract_params(model), grads);
      inject_params(model, updated);
      state = std::move(next_state);

      report.step_losses.push_back(step_loss);
      report.step_branches.push_back(0);
      ++report.branch_steps[0];
    }
  }

  report.final_mse = evaluate(model, data, options.loss).mean_loss;
  report.branch_mse = {report.final_mse};
  report.seconds = elapsed_seconds(start);
  return report;
}

std::string first_bank_difference(const ParameterBank& a,
                                  const ParameterBank& b) {
  if (!(a.layout() == b.layout())) return "layout";
  if (a.branch_count() != b.branch_count()) return "branch_count";
  for (std::size_t i = 0; i < a.branch_count(); ++i) {
    const std::string at = "branch " + std::to_string(i) + " ";
    const BranchIndex bi{i};
    if (auto k = first_mismatch(a.params(bi).values, b.params(bi).values);
        k != std::string::npos) {
      return at + "params[" + std::to_string(k) + "]";
    }
    const auto& sa = a.optimizer_state(bi);
    const auto& sb = b.optimizer_state(bi);
    if (!(sa.config == sb.config)) return at + "optimizer config";
    if (sa.step_count != sb.step_count) return at + "step_count";
    if (auto k = first_mismatch(sa.first_moment, sb.first_moment);
        k != std::string::npos) {
      return at + "first_moment[" + std::to_string(k) + "]";
    }
    if (auto k = first_mismatch(sa.second_moment, sb.second_moment);
        k != std::string::npos) {
      return at + "second_moment[" + std::to_string(k) + "]";
    }
  }
  return {};
}

PartitionVerdict partition_oracle(const ModelLayout& layout,
                                  const ConditionArray& conditions,
                                  std::span<const TrainRecord> data,
                                  const TrainOptions& options, InitMode mode,
                                  std::uint64_t seed,
                                  const OptimizerConfig& optimizer) {
  const std::size_t n = conditions.branch_count();

  ParameterBank swapped = bank_init(layout, n, mode, seed, optimizer);
  MLPModel live(layout);
  train(live, swapped, conditions, data, options);

  // Each branch's routed subsequence across all epochs, in visiting order.
  std::vector<Dataset> routed(n);
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    for (std::size_t idx : epoch_order(data.size(), epoch, options.shuffle_seed))
      routed[route(conditions, data[idx].x).value].push_back(data[idx]);
  }

  std::vector<FlatParams> params;
  std::vector<OptimizerState> states;
  for (std::size_t i = 0; i < n; ++i) {
    MLPModel model(layout);
    inject_params(model, init_params(layout, branch_init_seed(mode, seed, i)));
    OptimizerState state =
        OptimizerState::fresh(optimizer, layout.parameter_count());
    if (!routed[i].empty()) {
      TrainOptions once = options;
      once.epochs = 1;
      once.shuffle_seed.reset();
      train_monolithic(model, state, routed[i], once);
    }
    params.push_back(extract_params(model));
    states.push_back(std::move(state));
  }
  const ParameterBank independent(layout, std::move(params), std::move(states),
                                  mode, seed);

  PartitionVerdict v;
  v.first_difference = first_bank_difference(swapped, independent);
  v.equal = v.first_difference.empty();
  return v;
}

Evaluation evaluate(const MLPModel& model, std::span<const TrainRecord> data,
                    LossKind loss_kind) {
  if (data.empty()) throw ValidationError("dataset: no records to evaluate");
  double sum = 0.0;
  for (const TrainRecord& r : data)
    sum = sum + loss(loss_kind, r.y, forward(model, r.x).output());
  return {sum / static_cast<double>(data.size()), {}, {}};
}

Evaluation evaluate(const ParameterBank& bank, const ConditionArray& conditions,
                    std::span<const TrainRecord> data, LossKind loss_kind) {
  if (data.empty()) throw ValidationError("dataset: no records to evaluate");
  check_branch_counts(bank, conditions);
  const std::size_t n = bank.branch_count();

  std::vector<MLPModel> models;
  models.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    models.emplace_back(bank.layout());
    load_branch(bank, {i}, models.back());
  }

  Evaluation e;
  e.branch_counts.assign(n, 0);
  std::vector<double> sums(n, 0.0);
  double total = 0.0;
  for (const TrainRecord& r : data) {
    const std::size_t b = route(conditions, r.x).value;
    const double l = loss(loss_kind, r.y, forward(models[b], r.x).output());
    total = total + l;
    sums[b] = sums[b] + l;
    ++e.branch_counts[b];
  }
  e.mean_loss = total / static_cast<double>(data.size());
  e.branch_mean_loss.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    e.branch_mean_loss[i] =
        e.branch_counts[i] == 0
            ? std::numeric_limits<double>::quiet_NaN()
            : sums[i] / static_cast<double>(e.branch_counts[i]);
  }
  return e;
}

void write_report_csv(const std::filesystem::path& path,
                      const TrainReport& report) {
  std::string out = "step,branch,loss\n";
  for (std::size_t i = 0; i < report.step_losses.size(); ++i) {
    out += std::to_string(i);
    out += ',';
    out += std::to_string(report.step_branches[i]);
    out += ',';
    out += format_double(report.step_losses[i]);
    out += '\n';
  }
  write_text_file(path, out);
}

}  // namespace lactose

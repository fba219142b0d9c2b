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
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lactose/bank.hpp"
#include "lactose/netcore.hpp"
#include "lactose/record.hpp"
#include "lactose/router.hpp"

namespace lactose {

struct TrainOptions {
  std::size_t epochs = 1;
  // Unset: records are visited in dataset order every epoch.
  std::optional<std::uint64_t> shuffle_seed;
  LossKind loss = LossKind::kMSE;
};

struct TrainReport {
  std::vector<double> step_losses;        // pre-update loss of every step
  std::vector<std::size_t> step_branches;  // branch routed at every step
  std::vector<std::uint64_t> branch_steps;
  // Mean loss per branch and overall on the training set after training.
  std::vector<double> branch_mse;
  double final_mse = 0.0;
  double seconds = 0.0;

  std::size_t total_steps() const { return step_losses.size(); }
};

// Visiting order for `epoch`: identity when no seed is given, otherwise a
// Fisher-Yates permutation driven by SplitMix64(derive_seed(seed, epoch)).
std::vector<std::size_t> epoch_order(std::size_t n, std::size_t epoch,
                                     std::optional<std::uint64_t> shuffle_seed);

// One step of conditional parameter swapping:
//   1. route the record to branch i
//   2. load params[i] into the live model
//   3. forward, loss, backward
//   4. optimizer update with branch i's own state
//   5. store the new parameters and state back into slot i
// Returns the loss before the update. Every error is raised before step 5,
// so a failed step leaves the bank untouched.
double lactose_step(MLPModel& model, ParameterBank& bank,
                    const ConditionArray& conditions,
                    const TrainRecord& record, LossKind loss_kind);

// Throws ValidationError on an empty dataset or when the conditions and the
// bank disagree on the branch count.
TrainReport train(MLPModel& model, ParameterBank& bank,
                  const ConditionArray& conditions, std::span<const TrainRecord> data,
                  const TrainOptions& options);

// Ordinary training of a single parameter set with the same step mechanics
// and no routing.
TrainReport train_monolithic(MLPModel& model, OptimizerState& state,
                             std::span<const TrainRecord> data,
                             const TrainOptions& options);

struct PartitionVerdict {
  bool equal = false;
  // Empty when equal; otherwise names the first differing branch, field and
  // element, e.g. "branch 1 params[17]".
  std::string first_difference;
};

// Trains a bank with lactose_step, then trains one independent model per
// branch (same init, fresh optimizer state) on just the records routed to
// it, in the same relative order, and compares the results byte for byte.
PartitionVerdict partition_oracle(const ModelLayout& layout,
                                  const ConditionArray& conditions,
                                  std::span<const TrainRecord> data,
                                  const TrainOptions& options, InitMode mode,
                                  std::uint64_t seed,
                                  const OptimizerConfig& optimizer);

// Byte comparison of two banks; empty string when identical.
std::string first_bank_difference(const ParameterBank& a, const ParameterBank& b);

struct Evaluation {
  double mean_loss = 0.0;
  std::vector<std::size_t> branch_counts;  // empty for a bare model
  std::vector<double> branch_mean_loss;    // NaN for branches with no records
};

// Pure. Throw ValidationError on an empty dataset.
Evaluation evaluate(const MLPModel& model, std::span<const TrainRecord> data,
                    LossKind loss_kind);
Evaluation evaluate(const ParameterBank& bank, const ConditionArray& conditions,
                    std::span<const TrainRecord> data, LossKind loss_kind);

// CSV with header "step,branch,loss".
void write_report_csv(const std::filesystem::path& path,
                      const TrainReport& report);

}  // namespace lactose

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
#include <string_view>
#include <vector>

#include "lactose/netcore.hpp"
#include "lactose/optimizer.hpp"
#include "lactose/router.hpp"

namespace lactose {

enum class InitMode {
  kShared,       // every branch starts from the same draw
  kIndependent,  // branch i draws from derive_seed(seed, i)
};

std::string_view to_string(InitMode mode);
InitMode parse_init_mode(std::string_view name);

// Seed used to initialize branch `branch` of a bank.
std::uint64_t branch_init_seed(InitMode mode, std::uint64_t seed,
                               std::size_t branch);

// N parameter snapshots plus one optimizer state per snapshot, held outside
// any model. A live MLPModel is switched between snapshots with load_branch
// and store_branch.
class ParameterBank {
 public:
  // Validates that every snapshot has `layout`, that there is one optimizer
  // state per snapshot with matching buffers, and that N >= 1.
  ParameterBank(ModelLayout layout, std::vector<FlatParams> params,
                std::vector<OptimizerState> states, InitMode init_mode,
                std::uint64_t init_seed);

  const ModelLayout& layout() const { return layout_; }
  std::size_t branch_count() const { return params_.size(); }
  InitMode init_mode() const { return init_mode_; }
  std::uint64_t init_seed() const { return init_seed_; }

  // Throw IndexError when i >= branch_count().
  const FlatParams& params(BranchIndex i) const;
  const OptimizerState& optimizer_state(BranchIndex i) const;

  // Replaces branch i's optimizer state. Shape-checked.
  void set_optimizer_state(BranchIndex i, OptimizerState state);

  bool bit_equal(const ParameterBank& other) const;

 private:
  friend void store_branch(ParameterBank&, BranchIndex, const MLPModel&);

  void check_index(BranchIndex i) const;

  ModelLayout layout_;
  std::vector<FlatParams> params_;
  std::vector<OptimizerState> states_;
  InitMode init_mode_;
  std::uint64_t init_seed_;
};

// Throws ValidationError when branch_count == 0.
ParameterBank bank_init(const ModelLayout& layout, std::size_t branch_count,
                        InitMode mode, std::uint64_t seed,
                        const OptimizerConfig& optimizer);

// model <- params[i]. The bank is not touched.
void load_branch(const ParameterBank& bank, BranchIndex i, MLPModel& model);
// params[i] <- model parameters. No other branch is touched.
void store_branch(ParameterBank& bank, BranchIndex i, const MLPModel& model);

// On-disk bank.
//
//   <path>       binary blob:
//                  "LACT" | version (1 byte) | payload | count (u64 LE)
//                payload is `count` little-endian IEEE-754 doubles: every
//                branch's parameters in branch order (canonical FlatParams
//                order), then for Adam every branch's first moment followed
//                by its second moment, again in branch order.
//   <path>.json  manifest: format version, layout, branch count, optional
//                routing conditions, optimizer kind and hyperparameters,
//                per-branch step counts, init mode and seed.
inline constexpr std::uint8_t kBankFormatVersion = 1;

std::filesystem::path manifest_path(const std::filesystem::path& blob);

// Writes both files via temporaries renamed into place. Throws FormatError
// if the files cannot be written.
void save_bank(const ParameterBank& bank, const std::filesystem::path& path,
               const ConditionArray* conditions = nullptr);

struct BankFile {
  ParameterBank bank;
  // Present when the bank was saved together with its conditions.
  std::optional<ConditionArray> conditions;
};

// Throws FormatError describing bad magic, unsupported version, truncation,
// or a manifest/blob mismatch. Nothing is returned on failure.
BankFile load_bank_file(const std::filesystem::path& path);
ParameterBank load_bank(const std::filesystem::path& path);

}  // namespace lactose

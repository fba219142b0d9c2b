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

#include "lactose/bank.hpp"

#include <string>

#include "lactose/error.hpp"
#include "lactose/rng.hpp"

namespace lactose {

std::string_view to_string(InitMode mode) {
  return mode == InitMode::kShared ? "shared" : "independent";
}

InitMode parse_init_mode(std::string_view name) {
  if (name == "shared") return InitMode::kShared;
  if (name == "independent") return InitMode::kIndependent;
  throw ValidationError("init.mode: unknown mode '" + std::string(name) +
                        "' (expected shared or independent)");
}

std::uint64_t branch_init_seed(InitMode mode, std::uint64_t seed,
                               std::size_t branch) {
  return derive_seed(seed, mode == InitMode::kShared ? 0 : branch);
}

ParameterBank::ParameterBank(ModelLayout layout, std::vector<FlatParams> params,
                             std::vector<OptimizerState> states,
                             InitMode init_mode, std::uint64_t init_seed)
    : layout_(std::move(layout)),
      params_(std::move(params)),
      states_(std::move(states)),
      init_mode_(init_mode),
      init_seed_(init_seed) {
  layout_.validate();
  if (params_.empty()) throw ValidationError("bank needs at least one branch");
  if (states_.size() != params_.size()) {
    throw ShapeError("bank has " + std::to_string(params_.size()) +
                     " parameter sets but " + std::to_string(states_.size()) +
                     " optimizer states");
  }
  const std::size_t n = layout_.parameter_count();
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (!(params_[i].layout == layout_) || params_[i].values.size() != n)
      throw ShapeError("branch " + std::to_string(i) + " layout mismatch");
    const auto& s = states_[i];
    const std::size_t moments = s.config.kind == OptimizerKind::kAdam ? n : 0;
    if (s.first_moment.size() != moments || s.second_moment.size() != moments) {
      throw ShapeError("branch " + std::to_string(i) +
                       " optimizer buffers do not match the layout");
    }
  }
}

void ParameterBank::check_index(BranchIndex i) const {
  if (i.value >= params_.size()) {
    throw IndexError("branch " + std::to_string(i.value) +
                     " out of range for a bank of " +
                     std::to_string(params_.size()));
  }
}

const FlatParams& ParameterBank::params(BranchIndex i) const {
  check_index(i);
  return params_[i.value];
}

const OptimizerState& ParameterBank::optimizer_state(BranchIndex i) const {
  check_index(i);
  return states_[i.value];
}

void ParameterBank::set_optimizer_state(BranchIndex i, OptimizerState state) {
  check_index(i);
  const std::size_t n = layout_.parameter_count();
  const std::size_t moments = state.config.kind == OptimizerKind::kAdam ? n : 0;
  if (state.first_moment.size() != moments ||
      state.second_moment.size() != moments) {
    throw ShapeError("optimizer buffers do not match the bank layout");
  }
  states_[i.value] = std::move(state);
}

bool ParameterBank::bit_equal(const ParameterBank& other) const {
  if (!(layout_ == other.layout_) || params_.size() != other.params_.size() ||
      init_mode_ != other.init_mode_ || init_seed_ != other.init_seed_) {
    return false;
  }
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (!params_[i].bit_equal(other.params_[i])) return false;
    if (!states_[i].bit_equal(other.states_[i])) return false;
  }
  return true;
}

ParameterBank bank_init(const ModelLayout& layout, std::size_t branch_count,
                        InitMode mode, std::uint64_t seed,
                        const OptimizerConfig& optimizer) {
  if (branch_count == 0)
    throw ValidationError("branch_count: must be at least 1");
  std::vector<FlatParams> params;
  std::vector<OptimizerState> states;
  params.reserve(branch_count);
  states.reserve(branch_count);
  for (std::size_t i = 0; i < branch_count; ++i) {
    params.push_back(init_params(layout, branch_init_seed(mode, seed, i)));
    states.push_back(OptimizerState::fresh(optimizer, layout.parameter_count()));
  }
  return ParameterBank(layout, std::move(params), std::move(states), mode, seed);
}

void load_branch(const ParameterBank& bank, BranchIndex i, MLPModel& model) {
  if (!(bank.layout() == model.layout()))
    throw ShapeError("bank layout does not match the model");
  inject_params(model, bank.params(i));
}

void store_branch(ParameterBank& bank, BranchIndex i, const MLPModel& model) {
  bank.check_index(i);
  if (!(bank.layout() == model.layout()))
    throw ShapeError("bank layout does not match the model");
  bank.params_[i.value] = extract_params(model);
}

}  // namespace lactose

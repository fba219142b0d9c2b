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

#include "lactose/optimizer.hpp"

#include <cmath>
#include <string>

#include "lactose/error.hpp"
#include "lactose/kernels.hpp"

namespace lactose {

std::string_view to_string(OptimizerKind kind) {
  return kind == OptimizerKind::kAdam ? "adam" : "sgd";
}

OptimizerKind parse_optimizer_kind(std::string_view name) {
  if (name == "sgd") return OptimizerKind::kSGD;
  if (name == "adam") return OptimizerKind::kAdam;
  throw ValidationError("optimizer.kind: unknown optimizer '" +
                        std::string(name) + "' (expected sgd or adam)");
}

void OptimizerConfig::validate() const {
  if (!std::isfinite(learning_rate) || learning_rate <= 0.0)
    throw ValidationError("optimizer.learning_rate: must be finite and > 0");
  if (kind == OptimizerKind::kAdam) {
    if (!(beta1 >= 0.0 && beta1 < 1.0))
      throw ValidationError("optimizer.beta1: must be in [0, 1)");
    if (!(beta2 >= 0.0 && beta2 < 1.0))
      throw ValidationError("optimizer.beta2: must be in [0, 1)");
    if (!std::isfinite(epsilon) || epsilon <= 0.0)
      throw ValidationError("optimizer.epsilon: must be finite and > 0");
  }
}

OptimizerState OptimizerState::fresh(const OptimizerConfig& config,
                                     std::size_t parameter_count) {
  config.validate();
  OptimizerState s{config, 0, {}, {}};
  if (config.kind == OptimizerKind::kAdam) {
    s.first_moment.assign(parameter_count, 0.0);
    s.second_moment.assign(parameter_count, 0.0);
  }
  return s;
}

bool OptimizerState::bit_equal(const OptimizerState& other) const {
  return config == other.config && step_count == other.step_count &&
         lactose::bit_equal(first_moment, other.first_moment) &&
         lactose::bit_equal(second_moment, other.second_moment);
}

FlatParams apply_update(OptimizerState& state, const FlatParams& params,
                        const FlatParams& grads) {
  if (!(params.layout == grads.layout) ||
      params.values.size() != grads.values.size()) {
    throw ShapeError("gradient layout does not match the parameters");
  }
  const std::size_t n = params.values.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(grads.values[i])) {
      throw NumericError("non-finite gradient component at index " +
                         std::to_string(i));
    }
  }
  const bool adam = state.config.kind == OptimizerKind::kAdam;
  if (adam && (state.first_moment.size() != n || state.second_moment.size() != n))
    throw ShapeError("optimizer moment buffers do not match the parameters");

  const auto& k = kernels::active();
  FlatParams next = params;
  if (adam) {
    const double t = static_cast<double>(state.step_count + 1);
    const kernels::AdamCoefficients c{
        state.config.learning_rate,
        state.config.beta1,
        state.config.beta2,
        state.config.epsilon,
        1.0 - std::pow(state.config.beta1, t),
        1.0 - std::pow(state.config.beta2, t),
    };
    k.adam_update(next.values.data(), state.first_moment.data(),
                  state.second_moment.data(), grads.values.data(), c, n);
  } else {
    k.sgd_update(next.values.data(), grads.values.data(),
                 state.config.learning_rate, n);
  }
  ++state.step_count;
  return next;
}

}  // namespace lactose

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

#include <cstdint>
#include <string_view>
#include <vector>

#include "lactose/netcore.hpp"

namespace lactose {

enum class OptimizerKind { kSGD, kAdam };

std::string_view to_string(OptimizerKind kind);
OptimizerKind parse_optimizer_kind(std::string_view name);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::kSGD;
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  // Throws ValidationError naming the bad field.
  void validate() const;

  friend bool operator==(const OptimizerConfig&, const OptimizerConfig&) = default;
};

// Per-parameter-set optimizer state. Moments are empty for SGD and sized to
// the parameter count for Adam.
struct OptimizerState {
  OptimizerConfig config;
  std::uint64_t step_count = 0;
  std::vector<double> first_moment;
  std::vector<double> second_moment;

  static OptimizerState fresh(const OptimizerConfig& config,
                              std::size_t parameter_count);

  bool bit_equal(const OptimizerState& other) const;
};

// One optimizer step:
//   SGD:  p <- p - lr * g
//   Adam: bias-corrected first/second moment update with this state's
//         buffers (see kernels.hpp for the exact operation order).
// Increments state.step_count. Throws NumericError naming the first
// non-finite gradient component, ShapeError on size mismatch; on error
// neither the state nor anything else is modified.
FlatParams apply_update(OptimizerState& state, const FlatParams& params,
                        const FlatParams& grads);

}  // namespace lactose

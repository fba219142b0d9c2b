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
#include <span>
#include <vector>

namespace lactose {

// Branch selected for one sample; always < ConditionArray::branch_count().
struct BranchIndex {
  std::size_t value = 0;
  friend auto operator<=>(const BranchIndex&, const BranchIndex&) = default;
};

// Sorted breakpoints C_1 < ... < C_K on the real line. They split it into
// K+1 half-open intervals
//   (-inf, C_1), [C_1, C_2), ..., [C_K, +inf)
// so a value equal to a breakpoint belongs to the interval above it.
// The routing value is x[routing_feature]. Immutable once constructed.
class ConditionArray {
 public:
  // Validates; throws ValidationError naming the offending index.
  explicit ConditionArray(std::vector<double> breakpoints,
                          std::size_t routing_feature = 0);

  // Zero breakpoints: everything routes to branch 0. This is how a plain
  // single-parameter-set model is expressed as a one-branch bank.
  static ConditionArray single_branch(std::size_t routing_feature = 0);

  std::span<const double> breakpoints() const { return breakpoints_; }
  std::size_t routing_feature() const { return routing_feature_; }
  std::size_t branch_count() const { return breakpoints_.size() + 1; }

  // Branch for a scalar routing value. Throws RoutingError on NaN.
  BranchIndex route_value(double v) const;

  friend bool operator==(const ConditionArray&, const ConditionArray&) = default;

 private:
  ConditionArray() = default;

  std::vector<double> breakpoints_;
  std::size_t routing_feature_ = 0;
};

// Throws ValidationError unless breakpoints are non-empty, finite and
// strictly increasing. The message names the first offending index.
void validate_breakpoints(std::span<const double> breakpoints);

// Throws ShapeError when routing_feature >= x.size(), RoutingError when the
// routing value is NaN. Infinite values route to the outer branches.
BranchIndex route(const ConditionArray& conditions, std::span<const double> x);

}  // namespace lactose

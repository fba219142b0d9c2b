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

#include "lactose/router.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lactose/error.hpp"

namespace lactose {

void validate_breakpoints(std::span<const double> breakpoints) {
  if (breakpoints.empty())
    throw ValidationError("breakpoints: empty (at least one is required)");
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    if (!std::isfinite(breakpoints[i])) {
      throw ValidationError("breakpoints: non-finite value at index " +
                            std::to_string(i));
    }
    if (i == 0) continue;
    if (breakpoints[i] == breakpoints[i - 1]) {
      throw ValidationError("breakpoints: duplicate value at index " +
                            std::to_string(i));
    }
    if (breakpoints[i] < breakpoints[i - 1]) {
      throw ValidationError("breakpoints: not increasing at index " +
                            std::to_string(i));
    }
  }
}

ConditionArray::ConditionArray(std::vector<double> breakpoints,
                               std::size_t routing_feature)
    : breakpoints_(std::move(breakpoints)), routing_feature_(routing_feature) {
  validate_breakpoints(breakpoints_);
}

ConditionArray ConditionArray::single_branch(std::size_t routing_feature) {
  ConditionArray c;
  c.routing_feature_ = routing_feature;
  return c;
}

BranchIndex ConditionArray::route_value(double v) const {
  if (std::isnan(v)) throw RoutingError("routing value is NaN");
  // Number of breakpoints <= v.
  const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), v);
  return {static_cast<std::size_t>(it - breakpoints_.begin())};
}

BranchIndex route(const ConditionArray& conditions, std::span<const double> x) {
  if (conditions.routing_feature() >= x.size()) {
    throw ShapeError("routing feature " +
                     std::to_string(conditions.routing_feature()) +
                     " is out of range for an input of width " +
                     std::to_string(x.size()));
  }
  return conditions.route_value(x[conditions.routing_feature()]);
}

}  // namespace lactose

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

// JSON encoders shared by the bank manifest and the experiment config.

#include <string>

#include <json.hpp>

#include "lactose/netcore.hpp"
#include "lactose/optimizer.hpp"
#include "lactose/router.hpp"

namespace lactose::detail {

using nlohmann::json;

nlohmann::json layout_to_json(const ModelLayout& layout);
// `where` prefixes error messages, e.g. "model".
ModelLayout layout_from_json(const json& j, const std::string& where);

json optimizer_to_json(const OptimizerConfig& config);
OptimizerConfig optimizer_from_json(const json& j, const std::string& where);

json conditions_to_json(const ConditionArray& conditions);
// Empty breakpoints yield a single-branch array only when allow_empty.
ConditionArray conditions_from_json(const json& j, const std::string& where,
                                    bool allow_empty);

// Typed field access that reports "<where>.<key>: ..." on failure.
template <typename T>
T require(const json& j, const char* key, const std::string& where);
template <typename T>
T optional_field(const json& j, const char* key, const std::string& where,
                 T fallback);

}  // namespace lactose::detail

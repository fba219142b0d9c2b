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

#include "json_codec.hpp"

#include <cstdint>
#include <type_traits>
#include <vector>

#include "lactose/error.hpp"

namespace lactose::detail {

template <typename T>
T require(const json& j, const char* key, const std::string& where) {
  const std::string field = where.empty() ? key : where + "." + key;
  if (!j.is_object() || !j.contains(key))
    throw ValidationError(field + ": missing required field");
  if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
    const json& v = j.at(key);
    if (!v.is_number_integer() ||
        (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
      throw ValidationError(field + ": must be a non-negative integer");
    }
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError(field + ": wrong type");
  }
}

template <typename T>
T optional_field(const json& j, const char* key, const std::string& where,
                 T fallback) {
  if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) return fallback;
  return require<T>(j, key, where);
}

template double require<double>(const json&, const char*, const std::string&);
template std::size_t require<std::size_t>(const json&, const char*,
                                          const std::string&);
template std::string require<std::string>(const json&, const char*,
                                          const std::string&);
template std::vector<double> require<std::vector<double>>(const json&,
                                                          const char*,
                                                          const std::string&);
template double optional_field<double>(const json&, const char*,
                                       const std::string&, double);
template std::size_t optional_field<std::size_t>(const json&, const char*,
                                                 const std::string&,
                                                 std::size_t);
template std::string optional_field<std::string>(const json&, const char*,
                                                 const std::string&,
                                                 std::string);
template bool optional_field<bool>(const json&, const char*,
                                   const std::string&, bool);

json layout_to_json(const ModelLayout& layout) {
  json layers = json::array();
  for (const auto& l : layout.layers) {
    layers.push_back({{"in", l.in},
                      {"out", l.out},
                      {"activation", std::string(to_string(l.activation))}});
  }
  return {{"input_width", layout.input_width}, {"layers", layers}};
}

ModelLayout layout_from_json(const json& j, const std::string& where) {
  ModelLayout layout;
  layout.input_width = require<std::size_t>(j, "input_width", where);
  if (!j.contains("layers") || !j.at("layers").is_array())
    throw ValidationError(where + ".layers: missing or not an array");
  std::size_t width = layout.input_width;
  const auto& layers = j.at("layers");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const std::string at = where + ".layers[" + std::to_string(i) + "]";
    LayerShape s;
    s.in = optional_field<std::size_t>(layers[i], "in", at, width);
    s.out = require<std::size_t>(layers[i], "out", at);
    try {
      s.activation =
          parse_activation(require<std::string>(layers[i], "activation", at));
    } catch (const ValidationError& e) {
      throw ValidationError(at + ".activation: " + e.what());
    }
    layout.layers.push_back(s);
    width = s.out;
  }
  try {
    layout.validate();
  } catch (const ShapeError& e) {
    throw ValidationError(where + ".layers: " + e.what());
  }
  return layout;
}

json optimizer_to_json(const OptimizerConfig& c) {
  return {{"kind", std::string(to_string(c.kind))},
          {"learning_rate", c.learning_rate},
          {"beta1", c.beta1},
          {"beta2", c.beta2},
          {"epsilon", c.epsilon}};
}

OptimizerConfig optimizer_from_json(const json& j, const std::string& where) {
  OptimizerConfig c;
  c.kind = parse_optimizer_kind(
      optional_field<std::string>(j, "kind", where, "sgd"));
  c.learning_rate =
      optional_field<double>(j, "learning_rate", where, c.learning_rate);
  c.beta1 = optional_field<double>(j, "beta1", where, c.beta1);
  c.beta2 = optional_field<double>(j, "beta2", where, c.beta2);
  c.epsilon = optional_field<double>(j, "epsilon", where, c.epsilon);
  c.validate();
  return c;
}

json conditions_to_json(const ConditionArray& c) {
  return {{"breakpoints",
           std::vector<double>(c.breakpoints().begin(), c.breakpoints().end())},
          {"routing_feature", c.routing_feature()}};
}

ConditionArray conditions_from_json(const json& j, const std::string& where,
                                    bool allow_empty) {
  const auto feature =
      optional_field<std::size_t>(j, "routing_feature", where, 0);
  const auto points = require<std::vector<double>>(j, "breakpoints", where);
  if (points.empty() && allow_empty)
    return ConditionArray::single_branch(feature);
  try {
    return ConditionArray(points, feature);
  } catch (const ValidationError& e) {
    throw ValidationError(where + "." + e.what());
  }
}

}  // namespace lactose::detail

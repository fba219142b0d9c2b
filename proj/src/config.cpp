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

#include "lactose/config.hpp"

#include <fstream>
#include <iterator>

#include "json_codec.hpp"
#include "lactose/error.hpp"

namespace lactose {
namespace {

using detail::json;
using detail::optional_field;
using detail::require;

std::uint64_t seed_field(const json& j, const char* key, const std::string& where) {
  const std::string field = where + "." + key;
  if (!j.contains(key)) throw ValidationError(field + ": missing required field");
  const json& v = j.at(key);
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() &&
                                 v.get<std::int64_t>() < 0)) {
    throw ValidationError(field + ": must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

PieceFunction parse_piece(const json& j, const std::string& at) {
  const auto kind = require<std::string>(j, "kind", at);
  if (kind == "constant") return ConstantPiece{require<double>(j, "value", at)};
  if (kind == "linear")
    return LinearPiece{require<double>(j, "slope", at),
                       require<double>(j, "intercept", at)};
  if (kind == "sine")
    return SinePiece{optional_field<double>(j, "amplitude", at, 1.0),
                     require<double>(j, "frequency", at),
                     optional_field<double>(j, "phase", at, 0.0)};
  throw ValidationError(at + ".kind: unknown segment kind '" + kind +
                        "' (expected constant, linear or sine)");
}

PiecewiseSpec parse_generator(const json& j) {
  const std::string where = "data.generator";
  PiecewiseSpec spec;
  spec.x_min = require<double>(j, "x_min", where);
  spec.x_max = require<double>(j, "x_max", where);
  spec.noise_sigma = optional_field<double>(j, "noise_sigma", where, 0.0);
  spec.sample_count = require<std::size_t>(j, "sample_count", where);
  spec.seed = seed_field(j, "seed", where);
  if (!j.contains("segments") || !j.at("segments").is_array())
    throw ValidationError(where + ".segments: missing or not an array");
  const auto& segs = j.at("segments");
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const std::string at = where + ".segments[" + std::to_string(i) + "]";
    spec.segments.push_back({require<double>(segs[i], "lo", at),
                             require<double>(segs[i], "hi", at),
                             parse_piece(segs[i], at)});
  }
  try {
    spec.validate();
  } catch (const ValidationError& e) {
    throw ValidationError("data." + std::string(e.what()));
  }
  if (spec.sample_count == 0)
    throw ValidationError(where + ".sample_count: must be at least 1");
  return spec;
}

const json& section(const json& root, const char* key) {
  if (!root.contains(key) || !root.at(key).is_object())
    throw ValidationError(std::string(key) + ": missing section");
  return root.at(key);
}

}  // namespace

ConditionArray ExperimentConfig::routing() const {
  if (trainer == TrainerKind::kMonolithic || !conditions)
    return ConditionArray::single_branch();
  return *conditions;
}

ExperimentConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ValidationError("config: top level must be an object");

  ExperimentConfig cfg;
  cfg.layout = detail::layout_from_json(section(root, "model"), "model");
  cfg.optimizer = detail::optimizer_from_json(
      root.contains("optimizer") ? root.at("optimizer") : json::object(),
      "optimizer");

  const json training = root.contains("training") ? root.at("training") : json::object();
  const auto trainer = optional_field<std::string>(training, "trainer", "training", "lactose");
  if (trainer == "lactose") {
    cfg.trainer = TrainerKind::kLactose;
  } else if (trainer == "monolithic") {
    cfg.trainer = TrainerKind::kMonolithic;
  } else {
    throw ValidationError("training.trainer: expected lactose or monolithic");
  }
  cfg.epochs = optional_field<std::size_t>(training, "epochs", "training", 1);
  if (cfg.epochs == 0) throw ValidationError("training.epochs: must be at least 1");
  if (training.contains("shuffle_seed") && !training.at("shuffle_seed").is_null())
    cfg.shuffle_seed = seed_field(training, "shuffle_seed", "training");

  if (cfg.trainer == TrainerKind::kLactose || root.contains("conditions")) {
    cfg.conditions = detail::conditions_from_json(section(root, "conditions"),
                                                  "conditions", false);
    if (cfg.conditions->routing_feature() >= cfg.layout.input_width) {
      throw ValidationError(
          "conditions.routing_feature: index " +
          std::to_string(cfg.conditions->routing_feature()) +
          " is outside the model input width " +
          std::to_string(cfg.layout.input_width));
    }
  }

  const json& init = section(root, "init");
  cfg.init_mode =
      parse_init_mode(optional_field<std::string>(init, "mode", "init", "independent"));
  cfg.init_seed = seed_field(init, "seed", "init");

  const json& data = section(root, "data");
  if (data.contains("path") == data.contains("generator"))
    throw ValidationError("data: specify exactly one of path or generator");
  if (data.contains("path")) {
    cfg.dataset_path = require<std::string>(data, "path", "data");
  } else {
    cfg.generator = parse_generator(data.at("generator"));
    if (cfg.layout.input_width != 1 || cfg.layout.output_width() != 1) {
      throw ValidationError(
          "data.generator: produces 1-D inputs and targets but the model is " +
          std::to_string(cfg.layout.input_width) + "->" +
          std::to_string(cfg.layout.output_width()));
    }
  }

  if (root.contains("outputs")) {
    const json& out = root.at("outputs");
    auto& o = cfg.outputs;
    o.dataset = optional_field<std::string>(out, "dataset", "outputs", o.dataset.string());
    o.bank = optional_field<std::string>(out, "bank", "outputs", o.bank.string());
    o.report = optional_field<std::string>(out, "report", "outputs", o.report.string());
    o.metrics = optional_field<std::string>(out, "metrics", "outputs", o.metrics.string());
    o.predictions = optional_field<std::string>(out, "predictions", "outputs",
                                                o.predictions.string());
    o.compare = optional_field<std::string>(out, "compare", "outputs", o.compare.string());
  }
  if (root.contains("compare"))
    cfg.scaled_baseline =
        optional_field<bool>(root.at("compare"), "scaled_baseline", "compare", true);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ValidationError("config: cannot open '" + path.string() + "'");
  return parse_config(
      {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()});
}

}  // namespace lactose

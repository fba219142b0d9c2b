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
#include <filesystem>
#include <optional>
#include <string>

#include "lactose/bank.hpp"
#include "lactose/dataio.hpp"
#include "lactose/netcore.hpp"
#include "lactose/optimizer.hpp"
#include "lactose/router.hpp"

namespace lactose {

enum class TrainerKind { kLactose, kMonolithic };

// One experiment, loaded from a JSON file:
//
// {
//   "model":      {"input_width": 1,
//                  "layers": [{"out": 16, "activation": "tanh"},
//                             {"out": 1,  "activation": "linear"}]},
//   "conditions": {"breakpoints": [-1.0, 1.0], "routing_feature": 0},
//   "optimizer":  {"kind": "sgd", "learning_rate": 0.01,
//                  "beta1": 0.9, "beta2": 0.999, "epsilon": 1e-8},
//   "init":       {"mode": "independent", "seed": 7},
//   "training":   {"trainer": "lactose", "epochs": 20, "shuffle_seed": null},
//   "data":       {"path": "train.csv"}            -- or --
//   "data":       {"generator": {"x_min": -3, "x_max": 3, "noise_sigma": 0.05,
//                                "sample_count": 3000, "seed": 11,
//                                "segments": [{"lo": -3, "hi": -1,
//                                              "kind": "constant", "value": -1},
//                                             ...]}},
//   "outputs":    {"dataset": "...", "bank": "...", "report": "...",
//                  "metrics": "...", "predictions": "...", "compare": "..."},
//   "compare":    {"scaled_baseline": true}
// }
//
// Segment kinds: "constant" {value}, "linear" {slope, intercept},
// "sine" {amplitude, frequency, phase}. Relative paths are taken relative to
// the working directory.
struct ExperimentConfig {
  ModelLayout layout;
  // Required for the lactose trainer. Monolithic runs use a single branch.
  std::optional<ConditionArray> conditions;
  OptimizerConfig optimizer;
  InitMode init_mode = InitMode::kIndependent;
  std::uint64_t init_seed = 0;
  TrainerKind trainer = TrainerKind::kLactose;
  std::size_t epochs = 1;
  std::optional<std::uint64_t> shuffle_seed;

  std::optional<std::filesystem::path> dataset_path;
  std::optional<PiecewiseSpec> generator;

  struct Outputs {
    std::filesystem::path dataset = "dataset.csv";
    std::filesystem::path bank = "bank.lact";
    std::filesystem::path report = "report.csv";
    std::filesystem::path metrics = "metrics.csv";
    std::filesystem::path predictions = "predictions.csv";
    std::filesystem::path compare = "compare.csv";
  } outputs;

  bool scaled_baseline = true;

  // Conditions used for training: the configured array, or a single branch
  // for monolithic runs.
  ConditionArray routing() const;
};

// Throws ValidationError naming the offending field (e.g.
// "conditions.breakpoints: duplicate value at index 1").
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace lactose

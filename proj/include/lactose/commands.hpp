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
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "lactose/config.hpp"
#include "lactose/record.hpp"
#include "lactose/trainer.hpp"

// Implementations behind the `lactose` subcommands. Each one validates its
// inputs (config, dataset, bank) before writing any file. Optional paths
// override the corresponding entry in the config's "outputs" section.
namespace lactose::commands {

// Dataset named by the config: read from data.path or generated. Throws
// ValidationError if it is empty or its widths disagree with the model.
Dataset load_dataset(const ExperimentConfig& cfg);

// Writes the generated dataset as CSV. Requires a generator config.
std::filesystem::path generate(const ExperimentConfig& cfg,
                               const std::optional<std::filesystem::path>& out);

struct TrainOutcome {
  TrainReport report;
  std::filesystem::path bank_path;
  std::filesystem::path report_path;
};

// Trains (lactose or monolithic, per config) and writes the bank plus the
// step,branch,loss report.
TrainOutcome train(const ExperimentConfig& cfg,
                   const std::optional<std::filesystem::path>& bank_out,
                   const std::optional<std::filesystem::path>& report_out);

// Loads a bank and checks it against the config. Conditions come from the
// bank manifest when present; for a multi-branch bank they must agree with
// the config.
struct LoadedBank {
  ParameterBank bank;
  ConditionArray conditions;
};
LoadedBank open_bank(const ExperimentConfig& cfg,
                     const std::filesystem::path& bank_path);

// Prints overall and per-branch MSE to `log` and writes
// "branch,count,mse" rows (last row "all") to the metrics CSV.
Evaluation eval(const ExperimentConfig& cfg, const std::filesystem::path& bank_path,
                const std::optional<std::filesystem::path>& out, std::ostream& log);

// Routes and predicts every record of `input` (default: the config dataset)
// and writes the predictions CSV.
std::vector<std::vector<double>> predict(
    const ExperimentConfig& cfg, const std::filesystem::path& bank_path,
    const std::optional<std::filesystem::path>& input,
    const std::optional<std::filesystem::path>& out);

struct CompareArm {
  std::string name;
  std::size_t parameter_count = 0;  // per live model
  std::size_t total_steps = 0;
  double final_mse = 0.0;
};

// LACTOSE against a monolithic model with one branch's architecture,
// initialized like branch 0, trained for the same number of steps; plus,
// if enabled, a monolithic model whose hidden widths are scaled by
// sqrt(branch count). Writes "arm,parameter_count,total_steps,final_train_mse".
std::vector<CompareArm> compare(const ExperimentConfig& cfg,
                                const std::optional<std::filesystem::path>& out);

// Hidden widths multiplied by sqrt(branches), rounded to nearest.
ModelLayout scaled_layout(const ModelLayout& layout, std::size_t branches);

}  // namespace lactose::commands

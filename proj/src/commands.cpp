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

#include "lactose/commands.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "lactose/error.hpp"

namespace lactose::commands {
namespace {

void check_widths(const ExperimentConfig& cfg, const Dataset& data,
                  const std::string& what) {
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data[i].x.size() != cfg.layout.input_width ||
        data[i].y.size() != cfg.layout.output_width()) {
      throw ValidationError(what + ": record " + std::to_string(i) + " is " +
                            std::to_string(data[i].x.size()) + "->" +
                            std::to_string(data[i].y.size()) +
                            " but the model is " +
                            std::to_string(cfg.layout.input_width) + "->" +
                            std::to_string(cfg.layout.output_width()));
    }
  }
}

std::filesystem::path pick(const std::optional<std::filesystem::path>& override_path,
                           const std::filesystem::path& configured) {
  return override_path ? *override_path : configured;
}

}  // namespace

Dataset load_dataset(const ExperimentConfig& cfg) {
  Dataset data = cfg.dataset_path ? read_dataset(*cfg.dataset_path)
                                  : generate(*cfg.generator);
  if (data.empty()) throw ValidationError("dataset: no records");
  check_widths(cfg, data, "dataset");
  return data;
}

std::filesystem::path generate(const ExperimentConfig& cfg,
                               const std::optional<std::filesystem::path>& out) {
  if (!cfg.generator)
    throw ValidationError("data.generator: required by the generate command");
  const Dataset data = lactose::generate(*cfg.generator);
  const auto path = pick(out, cfg.outputs.dataset);
  write_dataset(path, data);
  return path;
}

TrainOutcome train(const ExperimentConfig& cfg,
                   const std::optional<std::filesystem::path>& bank_out,
                   const std::optional<std::filesystem::path>& report_out) {
  const Dataset data = load_dataset(cfg);
  const ConditionArray conditions = cfg.routing();
  TrainOptions options{cfg.epochs, cfg.shuffle_seed, LossKind::kMSE};

  ParameterBank bank = bank_init(cfg.layout, conditions.branch_count(),
                                 cfg.init_mode, cfg.init_seed, cfg.optimizer);
  MLPModel model(cfg.layout);
  TrainOutcome outcome;
  if (cfg.trainer == TrainerKind::kLactose) {
    outcome.report = lactose::train(model, bank, conditions, data, options);
  } else {
    load_branch(bank, {0}, model);
    OptimizerState state = bank.optimizer_state({0});
    outcome.report = train_monolithic(model, state, data, options);
    store_branch(bank, {0}, model);
    bank.set_optimizer_state({0}, std::move(state));
  }

  outcome.bank_path = pick(bank_out, cfg.outputs.bank);
  outcome.report_path = pick(report_out, cfg.outputs.report);
  save_bank(bank, outcome.bank_path, &conditions);
  write_report_csv(outcome.report_path, outcome.report);
  return outcome;
}

LoadedBank open_bank(const ExperimentConfig& cfg,
                     const std::filesystem::path& bank_path) {
  BankFile file = load_bank_file(bank_path);
  if (!(file.bank.layout() == cfg.layout))
    throw ValidationError("model: bank layout does not match the config");
  ConditionArray conditions = file.conditions ? *file.conditions
                                              : file.bank.branch_count() == 1
                                                    ? ConditionArray::single_branch()
                                                    : cfg.routing();
  if (file.bank.branch_count() > 1 && cfg.conditions &&
      !(*cfg.conditions == conditions)) {
    throw ValidationError(
        "conditions.breakpoints: config disagrees with the bank's conditions");
  }
  if (conditions.branch_count() != file.bank.branch_count()) {
    throw ValidationError("conditions.breakpoints: bank has " +
                          std::to_string(file.bank.branch_count()) +
                          " branches, conditions define " +
                          std::to_string(conditions.branch_count()));
  }
  return {std::move(file.bank), std::move(conditions)};
}

Evaluation eval(const ExperimentConfig& cfg, const std::filesystem::path& bank_path,
                const std::optional<std::filesystem::path>& out, std::ostream& log) {
  const LoadedBank loaded = open_bank(cfg, bank_path);
  const Dataset data = load_dataset(cfg);
  const Evaluation e = evaluate(loaded.bank, loaded.conditions, data, LossKind::kMSE);

  std::string csv = "branch,count,mse\n";
  for (std::size_t i = 0; i < e.branch_counts.size(); ++i) {
    csv += std::to_string(i) + "," + std::to_string(e.branch_counts[i]) + "," +
           format_double(e.branch_mean_loss[i]) + "\n";
    log << "branch " << i << ": n=" << e.branch_counts[i]
        << " mse=" << format_double(e.branch_mean_loss[i]) << "\n";
  }
  csv += "all," + std::to_string(data.size()) + "," + format_double(e.mean_loss) + "\n";
  log << "overall: n=" << data.size() << " mse=" << format_double(e.mean_loss)
      << "\n";
  write_text_file(pick(out, cfg.outputs.metrics), csv);
  return e;
}

std::vector<std::vector<double>> predict(
    const ExperimentConfig& cfg, const std::filesystem::path& bank_path,
    const std::optional<std::filesystem::path>& input,
    const std::optional<std::filesystem::path>& out) {
  const LoadedBank loaded = open_bank(cfg, bank_path);
  Dataset data = input ? read_dataset(*input) : load_dataset(cfg);
  if (data.empty()) throw ValidationError("input: no records");
  check_widths(cfg, data, "input");

  std::vector<MLPModel> models;
  for (std::size_t i = 0; i < loaded.bank.branch_count(); ++i) {
    models.emplace_back(cfg.layout);
    load_branch(loaded.bank, {i}, models.back());
  }
  std::vector<std::vector<double>> predictions;
  std::vector<std::size_t> branches;
  predictions.reserve(data.size());
  branches.reserve(data.size());
  for (const TrainRecord& r : data) {
    const std::size_t b = route(loaded.conditions, r.x).value;
    predictions.push_back(lactose::predict(models[b], r.x));
    branches.push_back(b);
  }
  write_predictions(pick(out, cfg.outputs.predictions), data, predictions, branches);
  return predictions;
}

ModelLayout scaled_layout(const ModelLayout& layout, std::size_t branches) {
  const double factor = std::sqrt(static_cast<double>(branches));
  std::vector<std::size_t> widths{layout.input_width};
  std::vector<Activation> acts;
  for (std::size_t i = 0; i < layout.layers.size(); ++i) {
    const bool hidden = i + 1 < layout.layers.size();
    const std::size_t w = layout.layers[i].out;
    widths.push_back(hidden ? std::max<std::size_t>(
                                  1, static_cast<std::size_t>(std::lround(w * factor)))
                            : w);
    acts.push_back(layout.layers[i].activation);
  }
  return ModelLayout::chain(widths, acts);
}

std::vector<CompareArm> compare(const ExperimentConfig& cfg,
                                const std::optional<std::filesystem::path>& out) {
  if (!cfg.conditions)
    throw ValidationError("conditions: required by the compare command");
  const Dataset data = load_dataset(cfg);
  const ConditionArray& conditions = *cfg.conditions;
  const TrainOptions options{cfg.epochs, cfg.shuffle_seed, LossKind::kMSE};
  std::vector<CompareArm> arms;

  {
    ParameterBank bank = bank_init(cfg.layout, conditions.branch_count(),
                                   cfg.init_mode, cfg.init_seed, cfg.optimizer);
    MLPModel model(cfg.layout);
    const TrainReport r = lactose::train(model, bank, conditions, data, options);
    arms.push_back({"lactose", cfg.layout.parameter_count(), r.total_steps(),
                    r.final_mse});
  }
  auto monolithic = [&](const std::string& name, const ModelLayout& layout) {
    MLPModel model = make_model(layout, branch_init_seed(cfg.init_mode, cfg.init_seed, 0));
    OptimizerState state = OptimizerState::fresh(cfg.optimizer, layout.parameter_count());
    const TrainReport r = train_monolithic(model, state, data, options);
    arms.push_back({name, layout.parameter_count(), r.total_steps(), r.final_mse});
  };
  monolithic("monolithic", cfg.layout);
  if (cfg.scaled_baseline)
    monolithic("monolithic_scaled", scaled_layout(cfg.layout, conditions.branch_count()));

  std::string csv = "arm,parameter_count,total_steps,final_train_mse\n";
  for (const auto& a : arms) {
    csv += a.name + "," + std::to_string(a.parameter_count) + "," +
           std::to_string(a.total_steps) + "," + format_double(a.final_mse) + "\n";
  }
  write_text_file(pick(out, cfg.outputs.compare), csv);
  return arms;
}

}  // namespace lactose::commands

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

// lactose: generate | train | eval | predict | compare
//
// Log verbosity comes from LACTOSE_LOG (quiet, info, debug; default info).
// Diagnostics go to stderr; metrics from `eval` go to stdout.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "lactose/commands.hpp"
#include "lactose/dataio.hpp"
#include "lactose/error.hpp"
#include "lactose/kernels.hpp"

namespace fs = std::filesystem;

namespace {

enum class Verbosity { kQuiet, kInfo, kDebug };

Verbosity verbosity() {
  const char* env = std::getenv("LACTOSE_LOG");
  if (env == nullptr) return Verbosity::kInfo;
  const std::string v(env);
  if (v == "quiet") return Verbosity::kQuiet;
  if (v == "debug") return Verbosity::kDebug;
  return Verbosity::kInfo;
}

void info(const std::string& msg) {
  if (verbosity() != Verbosity::kQuiet) std::cerr << "lactose: " << msg << "\n";
}

void debug(const std::string& msg) {
  if (verbosity() == Verbosity::kDebug) std::cerr << "lactose: " << msg << "\n";
}

std::optional<fs::path> opt_path(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return fs::path(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conditional parameter-bank training for piecewise regression"};
  app.require_subcommand(1);

  std::string config_path;
  std::string bank_path;
  std::string out_path;
  std::string input_path;
  std::string report_path;

  auto* gen = app.add_subcommand("generate", "Write the configured synthetic dataset as CSV");
  auto* train = app.add_subcommand("train", "Train a bank and write it with a step report");
  auto* eval = app.add_subcommand("eval", "Report overall and per-branch MSE of a bank");
  auto* pred = app.add_subcommand("predict", "Write per-record predictions of a bank");
  auto* cmp = app.add_subcommand("compare", "Train LACTOSE and monolithic baselines side by side");

  for (auto* sub : {gen, train, eval, pred, cmp})
    sub->add_option("--config", config_path, "Experiment config (JSON)")->required();
  for (auto* sub : {train, eval, pred})
    sub->add_option("--bank", bank_path, "Bank file (manifest at <bank>.json)");
  for (auto* sub : {gen, train, eval, pred, cmp})
    sub->add_option("--out", out_path, "Output CSV path");
  pred->add_option("--input", input_path, "Input CSV (default: config dataset)");
  train->add_option("--report", report_path, "Report CSV path (overrides --out)");

  CLI11_PARSE(app, argc, argv);

  try {
    const lactose::ExperimentConfig cfg = lactose::load_config(config_path);
    debug("kernels: " + std::string(lactose::kernels::backend_name(
                            lactose::kernels::active().backend)));

    if (gen->parsed()) {
      const auto path = lactose::commands::generate(cfg, opt_path(out_path));
      info("wrote dataset " + path.string());
    } else if (train->parsed()) {
      auto report = opt_path(report_path);
      if (!report) report = opt_path(out_path);
      const auto outcome = lactose::commands::train(cfg, opt_path(bank_path), report);
      std::ostringstream msg;
      msg << "trained " << outcome.report.total_steps() << " steps, final mse "
          << lactose::format_double(outcome.report.final_mse) << "; wrote "
          << outcome.bank_path.string() << " and " << outcome.report_path.string();
      info(msg.str());
    } else if (eval->parsed()) {
      const fs::path bank = bank_path.empty() ? cfg.outputs.bank : fs::path(bank_path);
      lactose::commands::eval(cfg, bank, opt_path(out_path), std::cout);
    } else if (pred->parsed()) {
      const fs::path bank = bank_path.empty() ? cfg.outputs.bank : fs::path(bank_path);
      const auto p = lactose::commands::predict(cfg, bank, opt_path(input_path),
                                                opt_path(out_path));
      info("wrote " + std::to_string(p.size()) + " predictions");
    } else if (cmp->parsed()) {
      for (const auto& arm : lactose::commands::compare(cfg, opt_path(out_path))) {
        std::cout << arm.name << ": params=" << arm.parameter_count
                  << " steps=" << arm.total_steps
                  << " mse=" << lactose::format_double(arm.final_mse) << "\n";
      }
    }
  } catch (const lactose::Error& e) {
    std::cerr << "lactose: error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "lactose: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

/*
 * Copyright 2026 The prmcmc Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "prmcmc/config.hpp"
#include "prmcmc/csv.hpp"

namespace prmcmc {

std::unique_ptr<StateSpaceModel> make_model(const RunConfig& config);
std::vector<double> default_sim_theta(const std::string& model);

SimulatedData simulate_data(const RunConfig& config, const StateSpaceModel& model);
// The data file when configured, otherwise a simulation.
ObservationSeries load_observations(const RunConfig& config, const StateSpaceModel& model);

struct RunResult {
  CsvTable results;  // one row per reported window
  std::vector<StepDiagnostics> steps;
};

// Runs the configured mode. On a numerical failure the steps completed so
// far are kept in `partial` before the exception propagates.
RunResult run_estimation(const RunConfig& config, const StateSpaceModel& model,
                         const ObservationSeries& y, RunResult* partial = nullptr);

// Exact per-window posterior summaries and log marginal likelihood.
CsvTable oracle_table(const RunConfig& config, const ObservationSeries& y);

// Subcommands. Write into config.out and return the process exit code;
// configuration problems throw ConfigError.
int cmd_simulate(const RunConfig& config);
int cmd_run(const RunConfig& config);
int cmd_oracle_lg(const RunConfig& config);
int cmd_diagnose(const std::string& diagnostics_path, std::ostream& out);

}  // namespace prmcmc

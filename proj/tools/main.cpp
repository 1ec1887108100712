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

// prmcmc: particle rolling MCMC with double block sampling.
//
//   prmcmc simulate  --config run.cfg --out data/
//   prmcmc run       --config run.cfg --mode rolling --seed 7 --out results/
//   prmcmc oracle-lg --config run.cfg --out results/
//   prmcmc diagnose  results/diagnostics.csv
//
// Exit codes: 0 success, 2 configuration or usage error, 3 numerical failure.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "prmcmc/commands.hpp"
#include "prmcmc/errors.hpp"

namespace {

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string mode;
  std::string out;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "Configuration file of key = value lines");
  cmd->add_option("--seed", opts.seed, "Random seed (engine seed; simulation seed for simulate)");
  cmd->add_option("--mode", opts.mode, "rolling, sequential or simple")
      ->check(CLI::IsMember({"rolling", "sequential", "simple"}));
  cmd->add_option("--out", opts.out, "Output directory");
  cmd->add_option("--set", opts.overrides, "Override a configuration key (key=value)");
}

prmcmc::RunConfig build_config(const CommonOptions& opts, bool seed_is_simulation) {
  prmcmc::RunConfig config =
      opts.config_path.empty() ? prmcmc::RunConfig{} : prmcmc::load_config(opts.config_path);
  for (const std::string& o : opts.overrides) prmcmc::apply_override(config, o);
  if (!opts.mode.empty()) prmcmc::apply_setting(config, "mode", opts.mode);
  if (!opts.out.empty()) config.out = opts.out;
  if (opts.seed) {
    if (seed_is_simulation) {
      config.sim_seed = *opts.seed;
    } else {
      config.engine.seed = *opts.seed;
    }
  }
  config.validate();
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Particle rolling MCMC with double block sampling"};
  app.require_subcommand(1);

  CommonOptions sim_opts;
  CommonOptions run_opts;
  CommonOptions oracle_opts;
  std::string diagnostics_path;
  CLI::App* simulate = app.add_subcommand("simulate", "Simulate a data set (data.csv)");
  add_common(simulate, sim_opts);
  CLI::App* run = app.add_subcommand("run", "Run the sampler (results, diagnostics, log_ml, timings)");
  add_common(run, run_opts);
  CLI::App* oracle = app.add_subcommand("oracle-lg", "Exact window posteriors for the linear Gaussian model");
  add_common(oracle, oracle_opts);
  CLI::App* diagnose = app.add_subcommand("diagnose", "Summarize a diagnostics.csv file");
  diagnose->add_option("file", diagnostics_path, "diagnostics.csv")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (simulate->parsed()) return prmcmc::cmd_simulate(build_config(sim_opts, true));
    if (run->parsed()) return prmcmc::cmd_run(build_config(run_opts, false));
    if (oracle->parsed()) return prmcmc::cmd_oracle_lg(build_config(oracle_opts, false));
    if (diagnose->parsed()) return prmcmc::cmd_diagnose(diagnostics_path, std::cout);
  } catch (const prmcmc::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const prmcmc::AllWeightsZero& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const prmcmc::DegenerateProposal& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

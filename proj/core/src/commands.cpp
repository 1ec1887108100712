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

#include "prmcmc/commands.hpp"

#include <cmath>
#include <filesystem>
#include <iomanip>

#include "prmcmc/errors.hpp"
#include "prmcmc/linear_gaussian.hpp"
#include "prmcmc/weights.hpp"

namespace prmcmc {
namespace {

std::string join(const std::string& dir, const std::string& file) {
  return (std::filesystem::path(dir) / file).string();
}

void prepare_out(const RunConfig& config) { std::filesystem::create_directories(config.out); }

CsvTable results_header(const StateSpaceModel& model) {
  CsvTable table;
  table.header = {"s", "t"};
  for (const std::string& name : model.parameter_names()) {
    table.header.push_back(name + "_mean");
    table.header.push_back(name + "_q025");
    table.header.push_back(name + "_q975");
  }
  for (const char* extra : {"log_ml", "r1", "r2", "ess", "resampled_add", "resampled_remove"}) {
    table.header.emplace_back(extra);
  }
  return table;
}

std::vector<std::string> result_row(const RollingEngine& engine, const StepDiagnostics& d) {
  const ParticleSystem& sys = engine.system();
  std::vector<std::string> row{std::to_string(sys.s), std::to_string(sys.t)};
  for (const ParameterSummary& p : summarize_parameters(sys)) {
    row.push_back(format_double(p.mean));
    row.push_back(format_double(p.lower));
    row.push_back(format_double(p.upper));
  }
  row.push_back(format_double(sys.log_ml));
  row.push_back(format_double(d.r1));
  row.push_back(format_double(d.r2));
  row.push_back(format_double(ess_from_log_weights(sys.log_weights)));
  row.push_back(d.resampled_add ? "1" : "0");
  row.push_back(d.resampled_remove ? "1" : "0");
  return row;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? std::nan("") : s / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
  if (v.size() < 2) return std::nan("");
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

std::unique_ptr<StateSpaceModel> make_model(const RunConfig& config) {
  config.validate();
  if (config.model == "lg") {
    const LGProposal q = config.proposal == "prior" ? LGProposal::prior : LGProposal::fully_adapted;
    return std::make_unique<LinearGaussianModel>(q, config.lg);
  }
  return std::make_unique<RsvModel>(config.rsv);
}

std::vector<double> default_sim_theta(const std::string& model) {
  if (model == "lg") return {1.0, 0.05};
  if (model == "rsv") return {0.0, 0.97, 0.0225, -0.3, 0.05, -0.4};
  throw ConfigError("model: expected one of lg, rsv");
}

SimulatedData simulate_data(const RunConfig& config, const StateSpaceModel& model) {
  std::vector<double> theta = config.sim_theta.empty() ? default_sim_theta(config.model) : config.sim_theta;
  if (theta.size() != model.param_dim()) {
    throw ConfigError("sim.theta needs " + std::to_string(model.param_dim()) + " values");
  }
  RngStream rng(config.sim_seed, {kSystemStream, 0, 0});
  try {
    return model.simulate(theta, config.sim_length, rng);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

ObservationSeries load_observations(const RunConfig& config, const StateSpaceModel& model) {
  if (config.data.empty()) return simulate_data(config, model).observations;
  try {
    return read_data(config.data, model.obs_dim()).observations;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("cannot load data: " + std::string(e.what()));
  }
}

RunResult run_estimation(const RunConfig& config, const StateSpaceModel& model,
                         const ObservationSeries& y, RunResult* partial) {
  EngineConfig ec = config.engine;
  ec.scheme = config.mode == RunMode::simple ? Scheme::simple : Scheme::block;
  const TimeIndex T = y.length();
  if (config.mode != RunMode::sequential && config.window > T) {
    throw ConfigError("window exceeds the data length");
  }
  RunResult result;
  result.results = results_header(model);
  RollingEngine engine(model, y, ec);
  try {
    if (config.mode == RunMode::sequential) {
      result.steps.push_back(engine.start());
      result.results.rows.push_back(result_row(engine, result.steps.back()));
      while (engine.system().t < T) {
        result.steps.push_back(engine.extend());
        result.results.rows.push_back(result_row(engine, result.steps.back()));
      }
    } else {
      result.steps.push_back(engine.start());
      while (engine.system().t < config.window) result.steps.push_back(engine.extend());
      result.results.rows.push_back(result_row(engine, result.steps.back()));
      while (engine.system().t < T) {
        result.steps.push_back(engine.roll());
        result.results.rows.push_back(result_row(engine, result.steps.back()));
      }
    }
  } catch (...) {
    if (partial) *partial = result;
    throw;
  }
  return result;
}

CsvTable oracle_table(const RunConfig& config, const ObservationSeries& y) {
  if (config.model != "lg") throw ConfigError("oracle-lg requires model = lg");
  CsvTable table;
  table.header = {"s", "t", "mu_mean", "mu_q025", "mu_q975", "sigma2_mean", "sigma2_q025",
                  "sigma2_q975", "log_ml"};
  const TimeIndex T = y.length();
  const bool sequential = config.mode == RunMode::sequential;
  if (!sequential && config.window > T) throw ConfigError("window exceeds the data length");
  for (TimeIndex t = sequential ? 1 : config.window; t <= T; ++t) {
    const TimeIndex s = sequential ? 1 : t - config.window + 1;
    const std::span<const double> window(y.values().data() + (s - 1), static_cast<std::size_t>(t - s + 1));
    const ConjugatePosterior post = conjugate_posterior(window, config.lg);
    table.rows.push_back({std::to_string(s), std::to_string(t), format_double(post.mu_mean()),
                          format_double(post.mu_quantile(0.025)), format_double(post.mu_quantile(0.975)),
                          format_double(post.sigma2_mean()), format_double(post.sigma2_quantile(0.025)),
                          format_double(post.sigma2_quantile(0.975)), format_double(post.log_marginal)});
  }
  return table;
}

int cmd_simulate(const RunConfig& config) {
  const auto model = make_model(config);
  const SimulatedData data = simulate_data(config, *model);
  prepare_out(config);
  write_csv(join(config.out, "data.csv"), data_table(data));
  return 0;
}

int cmd_run(const RunConfig& config) {
  const auto model = make_model(config);
  const ObservationSeries y = load_observations(config, *model);
  prepare_out(config);
  RunResult partial;
  RunResult result;
  try {
    result = run_estimation(config, *model, y, &partial);
  } catch (const AllWeightsZero&) {
    write_csv(join(config.out, "diagnostics.csv"), diagnostics_table(partial.steps));
    throw;
  } catch (const DegenerateProposal&) {
    write_csv(join(config.out, "diagnostics.csv"), diagnostics_table(partial.steps));
    throw;
  }
  write_csv(join(config.out, "results.csv"), result.results);
  write_csv(join(config.out, "diagnostics.csv"), diagnostics_table(result.steps));
  CsvTable ml;
  ml.header = {"s", "t", "log_ml"};
  for (const StepDiagnostics& d : result.steps) {
    ml.rows.push_back({std::to_string(d.s), std::to_string(d.t), format_double(d.log_ml)});
  }
  write_csv(join(config.out, "log_ml.csv"), ml);
  write_csv(join(config.out, "timings.csv"), timings_table(result.steps));
  return 0;
}

int cmd_oracle_lg(const RunConfig& config) {
  const auto model = make_model(config);
  const ObservationSeries y = load_observations(config, *model);
  const CsvTable table = oracle_table(config, y);
  prepare_out(config);
  write_csv(join(config.out, "oracle.csv"), table);
  return 0;
}

int cmd_diagnose(const std::string& diagnostics_path, std::ostream& out) {
  const CsvTable table = read_csv(diagnostics_path);
  const std::size_t stage = table.column("stage");
  const std::size_t r1 = table.column("r1");
  const std::size_t r2 = table.column("r2");
  const std::size_t ra = table.column("resampled_add");
  const std::size_t rr = table.column("resampled_remove");
  const std::size_t za = table.column("zero_add");
  const std::size_t zr = table.column("zero_remove");
  std::vector<double> r1_roll;
  std::vector<double> r2_roll;
  std::size_t init_resamples = 0;
  std::size_t roll_resamples = 0;
  std::size_t rolls = 0;
  std::size_t zeros = 0;
  for (const auto& row : table.rows) {
    const std::size_t events = (row[ra] == "1") + (row[rr] == "1");
    zeros += std::stoul(row[za]) + std::stoul(row[zr]);
    if (row[stage] == "roll") {
      ++rolls;
      roll_resamples += events;
      r1_roll.push_back(parse_double(row[r1]));
      r2_roll.push_back(parse_double(row[r2]));
    } else {
      init_resamples += events;
    }
  }
  out << std::setprecision(6);
  out << "steps: " << table.rows.size() << " (rolling: " << rolls << ")\n";
  out << "resample events: initial " << init_resamples << ", rolling " << roll_resamples << "\n";
  out << "R1t: mean " << mean_of(r1_roll) << ", sd " << sd_of(r1_roll) << "\n";
  out << "R2t: mean " << mean_of(r2_roll) << ", sd " << sd_of(r2_roll) << "\n";
  out << "zero-weight particles: " << zeros << "\n";
  if (!table.rows.empty()) out << "final log_ml: " << table.rows.back()[table.column("log_ml")] << "\n";
  return 0;
}

}  // namespace prmcmc

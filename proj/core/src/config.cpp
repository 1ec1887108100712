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

#include "prmcmc/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "prmcmc/errors.hpp"

namespace prmcmc {
namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw ConfigError(key + ": expected a number, got '" + v + "'");
  return x;
}

std::uint64_t to_unsigned(const std::string& key, const std::string& v) {
  std::uint64_t x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
  }
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item)));
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

template <typename F>
Setter number(F field) {
  return [field](RunConfig& c, const std::string& k, const std::string& v) {
    field(c) = to_double(k, v);
  };
}

template <typename F>
Setter count(F field) {
  return [field](RunConfig& c, const std::string& k, const std::string& v) {
    field(c) = static_cast<std::remove_reference_t<decltype(field(c))>>(to_unsigned(k, v));
  };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"model", [](RunConfig& c, const std::string&, const std::string& v) { c.model = v; }},
      {"proposal", [](RunConfig& c, const std::string&, const std::string& v) { c.proposal = v; }},
      {"mode",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         if (v == "rolling") c.mode = RunMode::rolling;
         else if (v == "sequential") c.mode = RunMode::sequential;
         else if (v == "simple") c.mode = RunMode::simple;
         else throw ConfigError(k + ": expected rolling, sequential or simple");
       }},
      {"window", count([](RunConfig& c) -> TimeIndex& { return c.window; })},
      {"data", [](RunConfig& c, const std::string&, const std::string& v) { c.data = v; }},
      {"out", [](RunConfig& c, const std::string&, const std::string& v) { c.out = v; }},
      {"sim.length", count([](RunConfig& c) -> TimeIndex& { return c.sim_length; })},
      {"sim.seed", count([](RunConfig& c) -> std::uint64_t& { return c.sim_seed; })},
      {"sim.theta",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.sim_theta = to_list(k, v); }},
      {"particles", count([](RunConfig& c) -> std::size_t& { return c.engine.particles; })},
      {"candidates", count([](RunConfig& c) -> std::size_t& { return c.engine.candidates; })},
      {"block", count([](RunConfig& c) -> std::size_t& { return c.engine.block; })},
      {"ess_threshold", number([](RunConfig& c) -> double& { return c.engine.ess_threshold; })},
      {"mcmc_sweeps", count([](RunConfig& c) -> std::size_t& { return c.engine.mcmc_sweeps; })},
      {"smoother",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.engine.use_smoother = to_bool(k, v);
       }},
      {"resampling",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         if (v == "multinomial") c.engine.resampling = ResamplingScheme::multinomial;
         else if (v == "systematic") c.engine.resampling = ResamplingScheme::systematic;
         else throw ConfigError(k + ": expected multinomial or systematic");
       }},
      {"seed", count([](RunConfig& c) -> std::uint64_t& { return c.engine.seed; })},
      {"workers", count([](RunConfig& c) -> std::size_t& { return c.engine.workers; })},
      {"theta_update_min_length",
       count([](RunConfig& c) -> std::size_t& { return c.engine.theta_update_min_length; })},
      {"lg.phi", number([](RunConfig& c) -> double& { return c.lg.phi; })},
      {"lg.state_noise_ratio", number([](RunConfig& c) -> double& { return c.lg.state_noise_ratio; })},
      {"lg.mu_prior_mean", number([](RunConfig& c) -> double& { return c.lg.mu_prior_mean; })},
      {"lg.mu_prior_scale", number([](RunConfig& c) -> double& { return c.lg.mu_prior_scale; })},
      {"lg.sigma2_shape", number([](RunConfig& c) -> double& { return c.lg.sigma2_shape; })},
      {"lg.sigma2_scale", number([](RunConfig& c) -> double& { return c.lg.sigma2_scale; })},
      {"rsv.mu_mean", number([](RunConfig& c) -> double& { return c.rsv.mu_mean; })},
      {"rsv.mu_var", number([](RunConfig& c) -> double& { return c.rsv.mu_var; })},
      {"rsv.phi_beta_a", number([](RunConfig& c) -> double& { return c.rsv.phi_beta_a; })},
      {"rsv.phi_beta_b", number([](RunConfig& c) -> double& { return c.rsv.phi_beta_b; })},
      {"rsv.sigma_eta2_shape", number([](RunConfig& c) -> double& { return c.rsv.sigma_eta2_shape; })},
      {"rsv.sigma_eta2_scale", number([](RunConfig& c) -> double& { return c.rsv.sigma_eta2_scale; })},
      {"rsv.xi_mean", number([](RunConfig& c) -> double& { return c.rsv.xi_mean; })},
      {"rsv.xi_var", number([](RunConfig& c) -> double& { return c.rsv.xi_var; })},
      {"rsv.sigma_u2_shape", number([](RunConfig& c) -> double& { return c.rsv.sigma_u2_shape; })},
      {"rsv.sigma_u2_scale", number([](RunConfig& c) -> double& { return c.rsv.sigma_u2_scale; })},
      {"rsv.step_phi", number([](RunConfig& c) -> double& { return c.rsv.step_phi; })},
      {"rsv.step_log_sigma_eta2",
       number([](RunConfig& c) -> double& { return c.rsv.step_log_sigma_eta2; })},
      {"rsv.step_rho", number([](RunConfig& c) -> double& { return c.rsv.step_rho; })},
      {"rsv.step_level", number([](RunConfig& c) -> double& { return c.rsv.step_level; })},
      {"rsv.state_block_mean", number([](RunConfig& c) -> double& { return c.rsv.state_block_mean; })},
  };
  return table;
}

}  // namespace

void RunConfig::validate() const {
  if (model != "lg" && model != "rsv") throw ConfigError("model: expected one of lg, rsv");
  if (proposal != "fully_adapted" && proposal != "prior") {
    throw ConfigError("proposal: expected fully_adapted or prior");
  }
  if (window < 1) throw ConfigError("window must be at least 1");
  if (sim_length < 1) throw ConfigError("sim.length must be at least 1");
  engine.validate();
}

void apply_setting(RunConfig& config, const std::string& key, const std::string& value) {
  const auto it = setters().find(key);
  if (it == setters().end()) throw ConfigError("unknown configuration key '" + key + "'");
  it->second(config, key, value);
}

void apply_override(RunConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + assignment + "'");
  apply_setting(config, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

RunConfig parse_config(const std::string& text) {
  RunConfig config;
  std::stringstream ss(text);
  std::string line;
  int number = 0;
  while (std::getline(ss, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.find('=') == std::string::npos) {
      throw ConfigError("line " + std::to_string(number) + ": expected key = value");
    }
    apply_override(config, line);
  }
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string to_string(RunMode mode) {
  switch (mode) {
    case RunMode::rolling: return "rolling";
    case RunMode::sequential: return "sequential";
    case RunMode::simple: return "simple";
  }
  return "rolling";
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [key, setter] : setters()) keys.push_back(key);
  return keys;
}

}  // namespace prmcmc

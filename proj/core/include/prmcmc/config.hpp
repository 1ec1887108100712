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

#include <cstdint>
#include <string>
#include <vector>

#include "prmcmc/engine.hpp"
#include "prmcmc/kalman.hpp"
#include "prmcmc/rsv.hpp"

namespace prmcmc {

enum class RunMode { rolling, sequential, simple };

// Everything a run needs. Loaded from `key = value` lines; '#' starts a
// comment. Unknown keys and malformed values raise ConfigError.
struct RunConfig {
  std::string model = "lg";               // lg | rsv
  std::string proposal = "fully_adapted";  // lg only: fully_adapted | prior
  RunMode mode = RunMode::rolling;
  TimeIndex window = 300;  // L + 1
  std::string data;        // CSV path; simulated when empty
  std::string out = "out";
  TimeIndex sim_length = 600;
  std::uint64_t sim_seed = 20240101;
  std::vector<double> sim_theta;  // model default when empty
  EngineConfig engine;
  LGHyper lg;
  RsvHyper rsv;

  void validate() const;
};

// Sets one key; `value` is the text right of '='.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);
// Parses "key=value".
void apply_override(RunConfig& config, const std::string& assignment);
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

std::string to_string(RunMode mode);
std::vector<std::string> config_keys();

}  // namespace prmcmc

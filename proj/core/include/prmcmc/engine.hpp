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

#include "prmcmc/backward_block.hpp"
#include "prmcmc/forward_block.hpp"
#include "prmcmc/state_space.hpp"

namespace prmcmc {

enum class Scheme { block, simple };
enum class ResamplingScheme { multinomial, systematic };

struct EngineConfig {
  std::size_t particles = 1000;   // N
  std::size_t candidates = 100;   // M
  std::size_t block = 2;          // K
  double ess_threshold = 0.5;     // resample-move when ESS < c N
  std::size_t mcmc_sweeps = 10;   // R
  bool use_smoother = true;
  Scheme scheme = Scheme::block;
  ResamplingScheme resampling = ResamplingScheme::multinomial;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  // Windows shorter than this update the states only; 0 means the number of
  // model parameters.
  std::size_t theta_update_min_length = 0;

  void validate() const;
};

// Weighted particles (theta^n, alpha^n_{s:t}) for the window [s, t].
struct ParticleSystem {
  std::size_t param_dim = 0;
  std::vector<double> theta;  // N x param_dim, row-major
  std::vector<Trajectory> paths;
  std::vector<double> log_weights;
  TimeIndex s = 1;
  TimeIndex t = 0;
  double log_ml = 0.0;  // log p-hat(y_{s:t})

  std::size_t size() const { return paths.size(); }
  Params theta_of(std::size_t n) const {
    return Params(theta).subspan(n * param_dim, param_dim);
  }
  MutVec theta_of(std::size_t n) { return MutVec(theta).subspan(n * param_dim, param_dim); }
};

// One engine step. Increments are log p-hat(y_t | ...) for the added
// observation and log p-hat(y_{s-1} | y_{s:t}) for the removed one, both
// from pre-resampling weights. Fields that do not apply are NaN.
struct StepDiagnostics {
  std::string stage;  // "init", "extend" or "roll"
  TimeIndex s = 0;
  TimeIndex t = 0;
  std::size_t block = 0;  // effective K
  double ess_start = 0.0;
  double ess_add = 0.0;
  double ess_remove = 0.0;
  double r1 = 0.0;
  double r2 = 0.0;
  bool resampled_add = false;
  bool resampled_remove = false;
  double log_ml_add = 0.0;
  double log_ml_remove = 0.0;
  double log_ml = 0.0;
  std::size_t zero_add = 0;
  std::size_t zero_remove = 0;
  double seconds = 0.0;
};

// Substep tags of the random streams. Stream ids are (particle, time of the
// step, substep), so draws never depend on the worker count.
namespace substep {
inline constexpr std::uint32_t kPrior = 1;
inline constexpr std::uint32_t kForward = 2;
inline constexpr std::uint32_t kAddResample = 3;
inline constexpr std::uint32_t kAddKernel = 4;
inline constexpr std::uint32_t kBackward = 5;
inline constexpr std::uint32_t kRemoveResample = 6;
inline constexpr std::uint32_t kRemoveKernel = 7;
}  // namespace substep

// Particle rolling MCMC over a fixed observation series.
class RollingEngine {
 public:
  RollingEngine(const StateSpaceModel& model, const ObservationSeries& y, EngineConfig config);

  const EngineConfig& config() const { return config_; }
  const StateSpaceModel& model() const { return model_; }
  const ObservationSeries& observations() const { return y_; }
  const ParticleSystem& system() const { return system_; }
  ParticleSystem& system() { return system_; }

  // Sequential learning: start() targets pi(theta, alpha_1 | y_1), each
  // extend() adds the next observation without removing any.
  StepDiagnostics start();
  StepDiagnostics extend();
  // start() followed by extend() until the window is [1, length].
  std::vector<StepDiagnostics> initialize_sequential(TimeIndex length);

  // Slides the window [s, t] to [s+1, t+1] with the configured scheme.
  StepDiagnostics roll();
  StepDiagnostics roll_once_block();
  StepDiagnostics roll_once_simple();

  // Multinomial (or systematic) resampling to uniform weights followed by R
  // kernel sweeps targeting the current window posterior.
  void resample_move(std::uint32_t step, std::uint32_t resample_tag, std::uint32_t kernel_tag);

 private:
  // Adds y_{t+1}; returns the ML increment and fills zero counts.
  double add_block(std::size_t K, StepDiagnostics& d);
  double add_simple(StepDiagnostics& d);
  double remove_block(std::size_t K, StepDiagnostics& d);
  double remove_simple(StepDiagnostics& d);
  bool maybe_resample(double ess, bool force, std::uint32_t step, std::uint32_t resample_tag,
                      std::uint32_t kernel_tag);
  double current_ess() const;

  const StateSpaceModel& model_;
  const ObservationSeries& y_;
  EngineConfig config_;
  ParticleSystem system_;
};

// Log-domain increment of p-hat from per-particle estimates:
// log sum_n W^n exp(log_phat^n) with W the normalized `log_weights`.
double log_ml_increment(std::span<const double> log_weights, std::span<const double> log_phat);

// Rebuilds log p-hat(y_{s:t}) after every step by telescoping the recorded
// increments.
std::vector<double> log_marginal_likelihood(const std::vector<StepDiagnostics>& steps);

double weighted_mean(std::span<const double> values, std::span<const double> probabilities);
// Smallest value whose cumulative weight reaches p.
double weighted_quantile(std::span<const double> values, std::span<const double> probabilities,
                         double p);

// Posterior summary of one parameter.
struct ParameterSummary {
  double mean = 0.0;
  double lower = 0.0;  // 2.5%
  double upper = 0.0;  // 97.5%
};

std::vector<ParameterSummary> summarize_parameters(const ParticleSystem& system);

}  // namespace prmcmc

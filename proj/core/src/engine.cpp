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

#include "prmcmc/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "prmcmc/errors.hpp"
#include "prmcmc/parallel.hpp"
#include "prmcmc/weights.hpp"

namespace prmcmc {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint32_t step_id(TimeIndex t) { return static_cast<std::uint32_t>(t); }

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::size_t count_zero(std::span<const double> log_phat) {
  return static_cast<std::size_t>(
      std::count(log_phat.begin(), log_phat.end(), kNegInf));
}

}  // namespace

void EngineConfig::validate() const {
  if (particles < 1) throw ConfigError("particles must be at least 1");
  if (candidates < 1) throw ConfigError("candidates must be at least 1");
  if (block < 1) throw ConfigError("block must be at least 1");
  if (!(ess_threshold >= 0.0 && ess_threshold <= 1.0)) {
    throw ConfigError("ess_threshold must lie in [0, 1]");
  }
  if (workers < 1) throw ConfigError("workers must be at least 1");
}

double log_ml_increment(std::span<const double> log_weights, std::span<const double> log_phat) {
  std::vector<double> joint(log_weights.size());
  for (std::size_t n = 0; n < joint.size(); ++n) joint[n] = log_add_terms(log_weights[n], log_phat[n]);
  return log_sum_exp(joint) - log_sum_exp(log_weights);
}

RollingEngine::RollingEngine(const StateSpaceModel& model, const ObservationSeries& y,
                             EngineConfig config)
    : model_(model), y_(y), config_(config) {
  config_.validate();
  if (y_.dim() != model_.obs_dim()) {
    throw std::invalid_argument("observation dimension does not match the model");
  }
  if (config_.theta_update_min_length == 0) config_.theta_update_min_length = model_.param_dim();
}

double RollingEngine::current_ess() const { return ess_from_log_weights(system_.log_weights); }

void RollingEngine::resample_move(std::uint32_t step, std::uint32_t resample_tag,
                                  std::uint32_t kernel_tag) {
  const std::size_t N = system_.size();
  const std::size_t p = system_.param_dim;
  const NormalizedWeights w = normalize(system_.log_weights);
  RngStream rng(config_.seed, {kSystemStream, step, resample_tag});
  const std::vector<std::size_t> ancestors =
      config_.resampling == ResamplingScheme::systematic
          ? systematic_resample(w.probabilities, N, rng)
          : multinomial_resample(w.probabilities, N, rng);

  std::vector<double> theta(N * p);
  std::vector<Trajectory> paths(N);
  for (std::size_t n = 0; n < N; ++n) {
    const Params src = system_.theta_of(ancestors[n]);
    std::copy(src.begin(), src.end(), theta.begin() + static_cast<std::ptrdiff_t>(n * p));
    paths[n] = system_.paths[ancestors[n]];
  }
  system_.theta = std::move(theta);
  system_.paths = std::move(paths);
  std::fill(system_.log_weights.begin(), system_.log_weights.end(), 0.0);

  const bool update_theta =
      static_cast<std::size_t>(system_.t - system_.s + 1) >= config_.theta_update_min_length;
  parallel_for_chunks(N, config_.workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t n = begin; n < end; ++n) {
      RngStream kr(config_.seed, {static_cast<std::uint32_t>(n), step, kernel_tag});
      for (std::size_t r = 0; r < config_.mcmc_sweeps; ++r) {
        model_.mcmc_kernel(system_.theta_of(n), system_.paths[n], y_, update_theta, kr);
      }
    }
  });
}

bool RollingEngine::maybe_resample(double ess, bool force, std::uint32_t step,
                                   std::uint32_t resample_tag, std::uint32_t kernel_tag) {
  const double N = static_cast<double>(system_.size());
  if (!force && config_.ess_threshold < 1.0 && !(ess < config_.ess_threshold * N)) return false;
  resample_move(step, resample_tag, kernel_tag);
  return true;
}

double RollingEngine::add_block(std::size_t K, StepDiagnostics& d) {
  const TimeIndex t = system_.t + 1;
  const std::size_t N = system_.size();
  const std::size_t dim = model_.state_dim();
  const BlockMoveOptions options{K, config_.candidates, config_.use_smoother};
  std::vector<double> log_phat(N);
  parallel_for_chunks(N, config_.workers, [&](std::size_t begin, std::size_t end) {
    BlockWorkspace ws;
    for (std::size_t n = begin; n < end; ++n) {
      RngStream rng(config_.seed, {static_cast<std::uint32_t>(n), step_id(t), substep::kForward});
      Trajectory& path = system_.paths[n];
      ForwardBlockResult res =
          forward_block_move(model_, system_.theta_of(n), path, y_, t, options, rng, ws);
      log_phat[n] = res.log_phat;
      auto& values = path.values();
      values.resize(static_cast<std::size_t>(res.first_time - path.first()) * dim);
      values.insert(values.end(), res.tail.begin(), res.tail.end());
    }
  });
  const double increment = log_ml_increment(system_.log_weights, log_phat);
  for (std::size_t n = 0; n < N; ++n) {
    system_.log_weights[n] = log_add_terms(system_.log_weights[n], log_phat[n]);
  }
  system_.t = t;
  d.zero_add = count_zero(log_phat);
  return increment;
}

double RollingEngine::add_simple(StepDiagnostics& d) {
  const TimeIndex t = system_.t + 1;
  const std::size_t N = system_.size();
  const std::size_t dim = model_.state_dim();
  std::vector<double> log_v(N);
  parallel_for_chunks(N, config_.workers, [&](std::size_t begin, std::size_t end) {
    std::vector<double> state(dim);
    for (std::size_t n = begin; n < end; ++n) {
      RngStream rng(config_.seed, {static_cast<std::uint32_t>(n), step_id(t), substep::kForward});
      Trajectory& path = system_.paths[n];
      const Params theta = system_.theta_of(n);
      ForwardContext ctx;
      ctx.time = t;
      ctx.y = y_.at(t);
      if (!path.empty()) {
        ctx.prev = std::as_const(path).at(t - 1);
        ctx.y_prev = y_.at(t - 1);
      }
      const double log_q = model_.propose_forward(ctx, theta, rng, state);
      if (!std::isfinite(log_q)) throw DegenerateProposal("forward proposal produced a non-finite draw");
      log_v[n] = inner_weight_forward(model_, ctx, state, log_q, theta);
      path.push_back(state);
    }
  });
  const double increment = log_ml_increment(system_.log_weights, log_v);
  for (std::size_t n = 0; n < N; ++n) {
    system_.log_weights[n] = log_add_terms(system_.log_weights[n], log_v[n]);
  }
  system_.t = t;
  d.zero_add = count_zero(log_v);
  return increment;
}

namespace {

// Removing y_{s-1} divides each weight by p-hat^n. The increment is
// sum_n W^n_{s:t} p-hat^n with the updated weights, i.e.
// sum_ok W^n_{s-1:t} / sum_ok W^n_{s-1:t} / p-hat^n.
double apply_remove(std::vector<double>& log_weights, std::span<const double> log_phat) {
  std::vector<double> kept;
  std::vector<double> divided;
  kept.reserve(log_weights.size());
  divided.reserve(log_weights.size());
  for (std::size_t n = 0; n < log_weights.size(); ++n) {
    if (log_phat[n] == kNegInf) {
      log_weights[n] = kNegInf;
      continue;
    }
    kept.push_back(log_weights[n]);
    divided.push_back(log_add_terms(log_weights[n], -log_phat[n]));
    log_weights[n] = divided.back();
  }
  const double log_divided = log_sum_exp(divided);
  if (log_divided == kNegInf) throw AllWeightsZero("backward reweighting");
  return log_sum_exp(kept) - log_divided;
}

}  // namespace

double RollingEngine::remove_block(std::size_t K, StepDiagnostics& d) {
  const std::size_t N = system_.size();
  const std::size_t dim = model_.state_dim();
  const BlockMoveOptions options{K, config_.candidates, config_.use_smoother};
  std::vector<double> log_phat(N);
  parallel_for_chunks(N, config_.workers, [&](std::size_t begin, std::size_t end) {
    BlockWorkspace ws;
    for (std::size_t n = begin; n < end; ++n) {
      RngStream rng(config_.seed,
                    {static_cast<std::uint32_t>(n), step_id(system_.t), substep::kBackward});
      Trajectory& path = system_.paths[n];
      BackwardBlockResult res =
          backward_block_move(model_, system_.theta_of(n), path, y_, options, rng, ws);
      log_phat[n] = res.log_phat_old;
      auto& values = path.values();
      std::copy(res.head.begin(), res.head.end(), values.begin() + static_cast<std::ptrdiff_t>(dim));
      path.drop_front();
    }
  });
  const double increment = apply_remove(system_.log_weights, log_phat);
  ++system_.s;
  d.zero_remove = count_zero(log_phat);
  return increment;
}

double RollingEngine::remove_simple(StepDiagnostics& d) {
  const std::size_t N = system_.size();
  const TimeIndex s = system_.s;
  std::vector<double> log_g(N);
  parallel_for_chunks(N, config_.workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t n = begin; n < end; ++n) {
      Trajectory& path = system_.paths[n];
      log_g[n] = model_.log_obs(y_.at(s), std::as_const(path).at(s), std::as_const(path).at(s + 1),
                                system_.theta_of(n));
      path.drop_front();
    }
  });
  const double increment = apply_remove(system_.log_weights, log_g);
  ++system_.s;
  d.zero_remove = count_zero(log_g);
  return increment;
}

StepDiagnostics RollingEngine::start() {
  const Stopwatch clock;
  const std::size_t N = config_.particles;
  const std::size_t p = model_.param_dim();
  const std::size_t dim = model_.state_dim();
  if (y_.length() < 1) throw std::invalid_argument("no observations");
  system_ = ParticleSystem{};
  system_.param_dim = p;
  system_.theta.assign(N * p, 0.0);
  system_.paths.assign(N, Trajectory(1, dim));
  system_.log_weights.assign(N, 0.0);
  system_.s = 1;
  system_.t = 0;
  parallel_for_chunks(N, config_.workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t n = begin; n < end; ++n) {
      RngStream rng(config_.seed, {static_cast<std::uint32_t>(n), 1, substep::kPrior});
      model_.sample_prior(rng, system_.theta_of(n));
    }
  });

  StepDiagnostics d;
  d.stage = "init";
  d.ess_start = static_cast<double>(N);
  if (config_.scheme == Scheme::block) {
    d.block = 0;
    d.log_ml_add = add_block(0, d);
  } else {
    d.log_ml_add = add_simple(d);
  }
  d.s = system_.s;
  d.t = system_.t;
  d.ess_add = current_ess();
  d.r1 = d.ess_add / d.ess_start;
  d.resampled_add = maybe_resample(d.ess_add, false, 1, substep::kAddResample, substep::kAddKernel);
  d.ess_remove = kNaN;
  d.r2 = kNaN;
  d.log_ml_remove = kNaN;
  system_.log_ml = d.log_ml_add;
  d.log_ml = system_.log_ml;
  d.seconds = clock.seconds();
  return d;
}

StepDiagnostics RollingEngine::extend() {
  const Stopwatch clock;
  if (system_.size() == 0) throw std::logic_error("extend() before start()");
  const TimeIndex j = system_.t + 1;
  if (j > y_.length()) throw std::out_of_range("no observation left to add");
  StepDiagnostics d;
  d.stage = "extend";
  d.ess_start = current_ess();
  bool force = false;
  if (config_.scheme == Scheme::block) {
    const std::size_t window = static_cast<std::size_t>(j - system_.s);
    d.block = std::min(config_.block, window);
    // While the block still reaches back to the first state, all particles
    // are resampled as well.
    force = j <= static_cast<TimeIndex>(config_.block);
    d.log_ml_add = add_block(d.block, d);
  } else {
    d.log_ml_add = add_simple(d);
  }
  d.s = system_.s;
  d.t = system_.t;
  d.ess_add = current_ess();
  d.r1 = d.ess_add / d.ess_start;
  d.resampled_add =
      maybe_resample(d.ess_add, force, step_id(j), substep::kAddResample, substep::kAddKernel);
  d.ess_remove = kNaN;
  d.r2 = kNaN;
  d.log_ml_remove = kNaN;
  system_.log_ml += d.log_ml_add;
  d.log_ml = system_.log_ml;
  d.seconds = clock.seconds();
  return d;
}

std::vector<StepDiagnostics> RollingEngine::initialize_sequential(TimeIndex length) {
  if (length < 1 || length > y_.length()) throw std::out_of_range("initial window out of range");
  std::vector<StepDiagnostics> steps;
  steps.reserve(static_cast<std::size_t>(length));
  steps.push_back(start());
  while (system_.t < length) steps.push_back(extend());
  return steps;
}

StepDiagnostics RollingEngine::roll() {
  return config_.scheme == Scheme::block ? roll_once_block() : roll_once_simple();
}

StepDiagnostics RollingEngine::roll_once_block() {
  const Stopwatch clock;
  if (system_.size() == 0) throw std::logic_error("roll() before initialization");
  const TimeIndex t = system_.t + 1;
  if (t > y_.length()) throw std::out_of_range("no observation left to add");
  StepDiagnostics d;
  d.stage = "roll";
  d.ess_start = current_ess();
  const std::size_t K_add = std::min<std::size_t>(config_.block, static_cast<std::size_t>(t - system_.s));
  d.block = K_add;
  d.log_ml_add = add_block(K_add, d);
  d.ess_add = current_ess();
  d.r1 = d.ess_add / d.ess_start;
  d.resampled_add =
      maybe_resample(d.ess_add, false, step_id(t), substep::kAddResample, substep::kAddKernel);
  const double ess_mid = d.resampled_add ? static_cast<double>(system_.size()) : d.ess_add;

  const std::size_t K_remove =
      std::min<std::size_t>(config_.block, static_cast<std::size_t>(system_.t - system_.s - 1));
  d.log_ml_remove = remove_block(K_remove, d);
  d.ess_remove = current_ess();
  d.r2 = d.ess_remove / ess_mid;
  d.resampled_remove = maybe_resample(d.ess_remove, false, step_id(t), substep::kRemoveResample,
                                      substep::kRemoveKernel);
  system_.log_ml += d.log_ml_add - d.log_ml_remove;
  d.s = system_.s;
  d.t = system_.t;
  d.log_ml = system_.log_ml;
  d.seconds = clock.seconds();
  return d;
}

StepDiagnostics RollingEngine::roll_once_simple() {
  const Stopwatch clock;
  if (system_.size() == 0) throw std::logic_error("roll() before initialization");
  const TimeIndex t = system_.t + 1;
  if (t > y_.length()) throw std::out_of_range("no observation left to add");
  StepDiagnostics d;
  d.stage = "roll";
  d.ess_start = current_ess();
  d.log_ml_add = add_simple(d);
  d.ess_add = current_ess();
  d.r1 = d.ess_add / d.ess_start;
  d.resampled_add =
      maybe_resample(d.ess_add, false, step_id(t), substep::kAddResample, substep::kAddKernel);
  const double ess_mid = d.resampled_add ? static_cast<double>(system_.size()) : d.ess_add;

  d.log_ml_remove = remove_simple(d);
  d.ess_remove = current_ess();
  d.r2 = d.ess_remove / ess_mid;
  d.resampled_remove = maybe_resample(d.ess_remove, false, step_id(t), substep::kRemoveResample,
                                      substep::kRemoveKernel);
  system_.log_ml += d.log_ml_add - d.log_ml_remove;
  d.s = system_.s;
  d.t = system_.t;
  d.log_ml = system_.log_ml;
  d.seconds = clock.seconds();
  return d;
}

std::vector<double> log_marginal_likelihood(const std::vector<StepDiagnostics>& steps) {
  std::vector<double> out;
  out.reserve(steps.size());
  double value = 0.0;
  for (const StepDiagnostics& d : steps) {
    if (d.stage == "init") {
      value = d.log_ml_add;
    } else if (d.stage == "extend") {
      value += d.log_ml_add;
    } else {
      value += d.log_ml_add - d.log_ml_remove;
    }
    out.push_back(value);
  }
  return out;
}

double weighted_mean(std::span<const double> values, std::span<const double> probabilities) {
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (probabilities[i] > 0.0) sum += probabilities[i] * values[i];
  }
  return sum;
}

double weighted_quantile(std::span<const double> values, std::span<const double> probabilities,
                         double p) {
  if (values.empty()) throw std::invalid_argument("weighted_quantile of an empty sample");
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b] || (values[a] == values[b] && a < b);
  });
  double cumulative = 0.0;
  for (std::size_t i : order) {
    cumulative += probabilities[i];
    if (cumulative >= p) return values[i];
  }
  return values[order.back()];
}

std::vector<ParameterSummary> summarize_parameters(const ParticleSystem& system) {
  const NormalizedWeights w = normalize(system.log_weights);
  std::vector<ParameterSummary> out(system.param_dim);
  std::vector<double> column(system.size());
  for (std::size_t k = 0; k < system.param_dim; ++k) {
    for (std::size_t n = 0; n < system.size(); ++n) column[n] = system.theta_of(n)[k];
    out[k] = {weighted_mean(column, w.probabilities),
              weighted_quantile(column, w.probabilities, 0.025),
              weighted_quantile(column, w.probabilities, 0.975)};
  }
  return out;
}

}  // namespace prmcmc

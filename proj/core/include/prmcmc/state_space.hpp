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

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "prmcmc/rng.hpp"

namespace prmcmc {

// Absolute (1-based) time index.
using TimeIndex = std::int64_t;

// Read-only view of one state or observation vector. An empty view marks an
// optional argument as absent.
using ConstVec = std::span<const double>;
using MutVec = std::span<double>;
using Params = std::span<const double>;

// Observations y_1..y_T, each of fixed dimension.
class ObservationSeries {
 public:
  ObservationSeries() = default;
  ObservationSeries(std::size_t dim, std::vector<double> values);

  std::size_t dim() const { return dim_; }
  TimeIndex length() const { return static_cast<TimeIndex>(dim_ ? values_.size() / dim_ : 0); }
  ConstVec at(TimeIndex t) const;
  const std::vector<double>& values() const { return values_; }

  // Copy of y_first..y_last, re-indexed to start at 1.
  ObservationSeries slice(TimeIndex first, TimeIndex last) const;

 private:
  std::size_t dim_ = 0;
  std::vector<double> values_;
};

// A contiguous run of states alpha_first..alpha_last stored flat.
class Trajectory {
 public:
  Trajectory() = default;
  Trajectory(TimeIndex first, std::size_t dim) : first_(first), dim_(dim) {}
  Trajectory(TimeIndex first, std::size_t dim, std::vector<double> values);

  TimeIndex first() const { return first_; }
  TimeIndex last() const { return first_ + static_cast<TimeIndex>(size()) - 1; }
  std::size_t size() const { return dim_ ? values_.size() / dim_ : 0; }
  std::size_t dim() const { return dim_; }
  bool empty() const { return values_.empty(); }

  ConstVec at(TimeIndex t) const;
  MutVec at(TimeIndex t);
  bool contains(TimeIndex t) const { return t >= first_ && t <= last(); }

  void push_back(ConstVec state);
  void drop_front();
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  friend bool operator==(const Trajectory&, const Trajectory&) = default;

 private:
  TimeIndex first_ = 1;
  std::size_t dim_ = 1;
  std::vector<double> values_;
};

// Where a forward proposal for alpha_j is drawn: the predecessor state (empty
// at the start of a series, where the initial density applies), the previous
// observation (empty when absent) and the current observation.
struct ForwardContext {
  TimeIndex time = 1;
  ConstVec prev;
  ConstVec y_prev;
  ConstVec y;
};

// Backward proposal for alpha_j given the successor alpha_{j+1} and y_j.
struct BackwardContext {
  TimeIndex time = 1;
  ConstVec next;
  ConstVec y;
};

struct SimulatedData {
  ObservationSeries observations;
  Trajectory states;
};

// Density bundle of a state space model with optional leverage coupling.
//
// For models with leverage, g may depend on alpha_{t+1} and f on y_t:
//   g(y_t | a_t) f(a_{t+1} | a_t, y_t) = f(a_{t+1} | a_t) g(y_t | a_t, a_{t+1}).
// Passing an empty `alpha_next` to log_obs selects g(y_t | a_t); passing an
// empty `y` to log_transition selects f(a_{t+1} | a_t). Models without
// leverage ignore the optional arguments.
//
// Implementations are immutable after construction; every source of
// randomness enters through an explicit RngStream.
class StateSpaceModel {
 public:
  virtual ~StateSpaceModel() = default;

  virtual std::string name() const = 0;
  virtual std::size_t state_dim() const = 0;
  virtual std::size_t obs_dim() const = 0;
  virtual std::vector<std::string> parameter_names() const = 0;
  std::size_t param_dim() const { return parameter_names().size(); }

  virtual double log_obs(ConstVec y, ConstVec alpha, ConstVec alpha_next, Params theta) const = 0;
  virtual double log_transition(ConstVec alpha_next, ConstVec alpha, ConstVec y, Params theta) const = 0;
  virtual double log_initial(ConstVec alpha, Params theta) const = 0;

  // p(alpha_{j-1} | alpha_j, theta) under the stationary state process.
  virtual bool has_backward_prior() const { return false; }
  virtual double log_backward_prior(ConstVec alpha_prev, ConstVec alpha, Params theta) const;

  virtual double log_prior(Params theta) const = 0;
  virtual void sample_prior(RngStream& rng, MutVec theta) const = 0;

  // Draws alpha_j into `out` and returns log q at the draw.
  virtual double propose_forward(const ForwardContext& ctx, Params theta, RngStream& rng,
                                 MutVec out) const = 0;
  virtual double log_forward_proposal(const ForwardContext& ctx, Params theta,
                                      ConstVec alpha) const = 0;
  virtual double propose_backward(const BackwardContext& ctx, Params theta, RngStream& rng,
                                  MutVec out) const;
  virtual double log_backward_proposal(const BackwardContext& ctx, Params theta,
                                       ConstVec alpha) const;

  // One sweep of a Markov kernel leaving pi(theta, alpha_{s:t} | y_{s:t})
  // invariant, where [s, t] is the range of `path`. With update_theta false
  // only the states move.
  virtual void mcmc_kernel(MutVec theta, Trajectory& path, const ObservationSeries& y,
                           bool update_theta, RngStream& rng) const = 0;

  virtual SimulatedData simulate(Params theta, TimeIndex length, RngStream& rng) const = 0;
};

// log p(theta) + log mu(a_s) + log g(y_s | a_s)
//   + sum_{j=s+1}^{t} [log f(a_j | a_{j-1}, y_{j-1}) + log g(y_j | a_j)]
double log_joint(const StateSpaceModel& model, Params theta, const Trajectory& path,
                 const ObservationSeries& y);

// The same joint density assembled in reverse time from the backward prior:
// log p(theta) + sum_{j=s+1}^{t} [log p(a_{j-1} | a_j) + log g(y_{j-1} | a_{j-1}, a_j)]
//   + log mu(a_t) + log g(y_t | a_t)
double backward_factorized_log_joint(const StateSpaceModel& model, Params theta,
                                     const Trajectory& path, const ObservationSeries& y);

// a + b with -inf absorbing (densities are never +inf).
inline double log_add_terms(double a, double b) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  return (a == kNegInf || b == kNegInf) ? kNegInf : a + b;
}

}  // namespace prmcmc

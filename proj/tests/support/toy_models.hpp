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

// Random walk observed with uniform noise on (-h, h). The bounded support
// makes zero inner weights reachable.

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "prmcmc/state_space.hpp"

namespace prmcmc::testing {

class BoxNoiseModel final : public StateSpaceModel {
 public:
  explicit BoxNoiseModel(double half_width) : h_(half_width) {}

  std::string name() const override { return "box"; }
  std::size_t state_dim() const override { return 1; }
  std::size_t obs_dim() const override { return 1; }
  std::vector<std::string> parameter_names() const override { return {}; }

  double log_obs(ConstVec y, ConstVec alpha, ConstVec, Params) const override {
    return std::abs(y[0] - alpha[0]) < h_ ? -std::log(2.0 * h_)
                                          : -std::numeric_limits<double>::infinity();
  }
  double log_transition(ConstVec next, ConstVec alpha, ConstVec, Params) const override {
    return std_normal(next[0] - alpha[0]);
  }
  double log_initial(ConstVec alpha, Params) const override { return std_normal(alpha[0]); }
  bool has_backward_prior() const override { return true; }
  double log_backward_prior(ConstVec prev, ConstVec alpha, Params) const override {
    return std_normal(prev[0] - alpha[0]);
  }
  double log_prior(Params) const override { return 0.0; }
  void sample_prior(RngStream&, MutVec) const override {}

  double propose_forward(const ForwardContext& ctx, Params, RngStream& rng,
                         MutVec out) const override {
    out[0] = (ctx.prev.empty() ? 0.0 : ctx.prev[0]) + rng.normal();
    return log_forward_proposal(ctx, {}, out);
  }
  double log_forward_proposal(const ForwardContext& ctx, Params, ConstVec alpha) const override {
    return std_normal(alpha[0] - (ctx.prev.empty() ? 0.0 : ctx.prev[0]));
  }
  double propose_backward(const BackwardContext& ctx, Params, RngStream& rng,
                          MutVec out) const override {
    out[0] = ctx.next[0] + rng.normal();
    return log_backward_proposal(ctx, {}, out);
  }
  double log_backward_proposal(const BackwardContext& ctx, Params, ConstVec alpha) const override {
    return std_normal(alpha[0] - ctx.next[0]);
  }
  void mcmc_kernel(MutVec, Trajectory&, const ObservationSeries&, bool, RngStream&) const override {}
  SimulatedData simulate(Params, TimeIndex, RngStream&) const override {
    throw std::logic_error("not used");
  }

 private:
  static double std_normal(double x) { return -0.5 * (std::log(2.0 * std::numbers::pi) + x * x); }
  double h_;
};

}  // namespace prmcmc::testing

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

#include "prmcmc/state_space.hpp"

namespace prmcmc {

// Priors and kernel tuning for the realized stochastic volatility model.
struct RsvHyper {
  double mu_mean = 0.0;
  double mu_var = 10.0;
  double phi_beta_a = 20.0;  // (phi + 1) / 2 ~ Beta(a, b)
  double phi_beta_b = 1.5;
  double sigma_eta2_shape = 2.5;
  double sigma_eta2_scale = 0.025;
  double xi_mean = 0.0;
  double xi_var = 10.0;
  double sigma_u2_shape = 2.5;
  double sigma_u2_scale = 0.025;
  // Random-walk step sizes on atanh(phi), log(sigma_eta2), atanh(rho).
  double step_phi = 0.15;
  double step_log_sigma_eta2 = 0.25;
  double step_rho = 0.15;
  // Random-walk step of the joint shift of (alpha, mu) by +d and xi by -d.
  double step_level = 0.1;
  // Mean length of the state blocks updated jointly by the kernel.
  double state_block_mean = 10.0;
};

// Gaussian approximation of the density of one state.
struct StateProposal {
  double mean = 0.0;
  double var = 1.0;
};

// Realized stochastic volatility with leverage; y_t = (return, log RV):
//   y1_t = exp(alpha_t / 2) eps_t
//   y2_t = alpha_t + xi + u_t,                      u_t ~ N(0, sigma_u2)
//   alpha_{t+1} = mu + phi (alpha_t - mu) + eta_t
//   corr(eps_t, eta_t) = rho, var(eta_t) = sigma_eta2
// theta = (mu, phi, sigma_eta2, xi, sigma_u2, rho).
class RsvModel final : public StateSpaceModel {
 public:
  explicit RsvModel(RsvHyper hyper = {});

  const RsvHyper& hyper() const { return hyper_; }

  std::string name() const override { return "rsv"; }
  std::size_t state_dim() const override { return 1; }
  std::size_t obs_dim() const override { return 2; }
  std::vector<std::string> parameter_names() const override {
    return {"mu", "phi", "sigma_eta2", "xi", "sigma_u2", "rho"};
  }

  double log_obs(ConstVec y, ConstVec alpha, ConstVec alpha_next, Params theta) const override;
  double log_transition(ConstVec alpha_next, ConstVec alpha, ConstVec y, Params theta) const override;
  double log_initial(ConstVec alpha, Params theta) const override;

  bool has_backward_prior() const override { return true; }
  double log_backward_prior(ConstVec alpha_prev, ConstVec alpha, Params theta) const override;

  double log_prior(Params theta) const override;
  void sample_prior(RngStream& rng, MutVec theta) const override;

  double propose_forward(const ForwardContext& ctx, Params theta, RngStream& rng,
                         MutVec out) const override;
  double log_forward_proposal(const ForwardContext& ctx, Params theta,
                              ConstVec alpha) const override;
  double propose_backward(const BackwardContext& ctx, Params theta, RngStream& rng,
                          MutVec out) const override;
  double log_backward_proposal(const BackwardContext& ctx, Params theta,
                               ConstVec alpha) const override;

  void mcmc_kernel(MutVec theta, Trajectory& path, const ObservationSeries& y, bool update_theta,
                   RngStream& rng) const override;

  SimulatedData simulate(Params theta, TimeIndex length, RngStream& rng) const override;

  // Gaussian proposal for alpha_j targeting
  //   [f(a_j | prev, y_prev) or stationary] [f(next | a_j, y_j) if next] g(y_j | a_j):
  // the y2 equation is combined exactly, then one Newton step is taken on
  // the return term. Falls back to the y2-combined Gaussian when the
  // curvature is not negative. Empty spans mark absent neighbours.
  StateProposal state_proposal(ConstVec prev, ConstVec y_prev, ConstVec next, ConstVec y,
                               Params theta) const;

 private:
  void update_states(Params theta, Trajectory& path, const ObservationSeries& y,
                     RngStream& rng) const;
  void update_parameters(MutVec theta, const Trajectory& path, const ObservationSeries& y,
                         RngStream& rng) const;
  void shift_level(MutVec theta, Trajectory& path, const ObservationSeries& y, RngStream& rng) const;
  double log_state_density(Params theta, const Trajectory& path, const ObservationSeries& y) const;

  RsvHyper hyper_;
};

}  // namespace prmcmc

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

#include "prmcmc/kalman.hpp"
#include "prmcmc/state_space.hpp"

namespace prmcmc {

enum class LGProposal { fully_adapted, prior };

// Univariate linear Gaussian model with theta = (mu, sigma2) and fixed phi.
//
// fully_adapted: q_j is p(alpha_j | alpha_{j-1}, y_j) forward and
//   p(alpha_j | alpha_{j+1}, y_j) backward, so inner weights do not depend on
//   the candidate.
// prior: q_j is the transition (or mu at the first state) forward and the
//   backward prior backward.
class LinearGaussianModel final : public StateSpaceModel {
 public:
  explicit LinearGaussianModel(LGProposal proposal = LGProposal::fully_adapted,
                               LGHyper hyper = {});

  const LGHyper& hyper() const { return hyper_; }
  LGProposal proposal() const { return proposal_; }

  std::string name() const override { return "lg"; }
  std::size_t state_dim() const override { return 1; }
  std::size_t obs_dim() const override { return 1; }
  std::vector<std::string> parameter_names() const override { return {"mu", "sigma2"}; }

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

 private:
  GaussianMoments forward_proposal(const ForwardContext& ctx, Params theta) const;
  GaussianMoments backward_proposal(const BackwardContext& ctx, Params theta) const;

  LGProposal proposal_;
  LGHyper hyper_;
};

}  // namespace prmcmc

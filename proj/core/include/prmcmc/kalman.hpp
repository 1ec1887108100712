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

#include <optional>
#include <span>
#include <vector>

#include "prmcmc/rng.hpp"

namespace prmcmc {

// Hyperparameters of the univariate linear Gaussian model
//   y_t = alpha_t + eps_t,                         eps_t ~ N(0, sigma2)
//   alpha_{t+1} = mu + phi (alpha_t - mu) + eta_t, eta_t ~ N(0, ratio * sigma2)
// with alpha_1 drawn from the stationary law and the conjugate prior
//   mu | sigma2 ~ N(mu_prior_mean, mu_prior_scale * sigma2),
//   sigma2 ~ IG(sigma2_shape, sigma2_scale).
struct LGHyper {
  double phi = 0.25;
  double state_noise_ratio = 2.0;
  double mu_prior_mean = 0.0;
  double mu_prior_scale = 10.0;
  double sigma2_shape = 2.5;
  double sigma2_scale = 0.025;

  double stationary_ratio() const { return state_noise_ratio / (1.0 - phi * phi); }
};

struct LGParams {
  double mu = 0.0;
  double sigma2 = 1.0;
};

struct GaussianMoments {
  double mean = 0.0;
  double var = 1.0;
};

struct KalmanState {
  std::vector<double> pred_mean;
  std::vector<double> pred_var;
  std::vector<double> filt_mean;
  std::vector<double> filt_var;
  double log_likelihood = 0.0;
};

// Kalman filter over y (indexed from its first element). `initial` is the
// prior of the first state; the stationary law when absent.
KalmanState kalman_filter(std::span<const double> y, LGParams theta, const LGHyper& hyper,
                          std::optional<GaussianMoments> initial = std::nullopt);

struct SmoothedMoments {
  std::vector<double> mean;
  std::vector<double> var;
};

SmoothedMoments kalman_smoother(std::span<const double> y, LGParams theta, const LGHyper& hyper,
                                std::optional<GaussianMoments> initial = std::nullopt);

// One joint draw of the states from p(alpha | y, theta) (forward filtering,
// backward sampling).
std::vector<double> simulation_smoother(std::span<const double> y, LGParams theta,
                                        const LGHyper& hyper, RngStream& rng,
                                        std::optional<GaussianMoments> initial = std::nullopt);

// Normal-inverse-gamma posterior of (mu, sigma2) given y with the states
// integrated out: y | mu, sigma2 ~ N(mu 1, sigma2 Sigma).
struct ConjugatePosterior {
  double mean = 0.0;      // m_n
  double scale = 0.0;     // v_n: mu | sigma2 ~ N(m_n, v_n sigma2)
  double shape = 0.0;     // a_n
  double rate = 0.0;      // b_n: sigma2 ~ IG(a_n, b_n)
  double log_marginal = 0.0;
  std::size_t count = 0;

  double mu_mean() const { return mean; }
  double sigma2_mean() const;
  double mu_quantile(double p) const;
  double sigma2_quantile(double p) const;
};

ConjugatePosterior conjugate_posterior(std::span<const double> y, const LGHyper& hyper);

// One Gibbs sweep: states by the simulation smoother, then (when
// update_theta) sigma2 from its conditional with mu integrated out and mu
// given sigma2.
void gibbs_kernel_lg(LGParams& theta, std::span<double> alpha, std::span<const double> y,
                     const LGHyper& hyper, bool update_theta, RngStream& rng);

}  // namespace prmcmc

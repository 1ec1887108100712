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

#include "prmcmc/linear_gaussian.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace prmcmc {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double normal_log_pdf(double x, double mean, double var) {
  const double d = x - mean;
  return -0.5 * (std::log(2.0 * std::numbers::pi * var) + d * d / var);
}

bool valid(Params theta) { return theta[1] > 0.0 && std::isfinite(theta[1]) && std::isfinite(theta[0]); }

// Combines a Gaussian prior for the state with the observation y = alpha + eps.
GaussianMoments condition_on(GaussianMoments prior, double y, double obs_var) {
  const double var = 1.0 / (1.0 / prior.var + 1.0 / obs_var);
  return {var * (prior.mean / prior.var + y / obs_var), var};
}

}  // namespace

LinearGaussianModel::LinearGaussianModel(LGProposal proposal, LGHyper hyper)
    : proposal_(proposal), hyper_(hyper) {
  if (!(std::abs(hyper_.phi) < 1.0) || !(hyper_.state_noise_ratio > 0.0) ||
      !(hyper_.mu_prior_scale > 0.0) || !(hyper_.sigma2_shape > 0.0) ||
      !(hyper_.sigma2_scale > 0.0)) {
    throw std::invalid_argument("invalid linear Gaussian hyperparameters");
  }
}

double LinearGaussianModel::log_obs(ConstVec y, ConstVec alpha, ConstVec, Params theta) const {
  if (!valid(theta)) return kNegInf;
  return normal_log_pdf(y[0], alpha[0], theta[1]);
}

double LinearGaussianModel::log_transition(ConstVec alpha_next, ConstVec alpha, ConstVec,
                                           Params theta) const {
  if (!valid(theta)) return kNegInf;
  const double mu = theta[0];
  return normal_log_pdf(alpha_next[0], mu + hyper_.phi * (alpha[0] - mu),
                        hyper_.state_noise_ratio * theta[1]);
}

double LinearGaussianModel::log_initial(ConstVec alpha, Params theta) const {
  if (!valid(theta)) return kNegInf;
  return normal_log_pdf(alpha[0], theta[0], hyper_.stationary_ratio() * theta[1]);
}

// The stationary AR(1) is reversible, so the backward prior has the
// transition's form.
double LinearGaussianModel::log_backward_prior(ConstVec alpha_prev, ConstVec alpha,
                                               Params theta) const {
  return log_transition(alpha_prev, alpha, ConstVec{}, theta);
}

double LinearGaussianModel::log_prior(Params theta) const {
  if (!valid(theta)) return kNegInf;
  const double s2 = theta[1];
  const double a = hyper_.sigma2_shape;
  const double b = hyper_.sigma2_scale;
  const double log_ig = a * std::log(b) - std::lgamma(a) - (a + 1.0) * std::log(s2) - b / s2;
  return normal_log_pdf(theta[0], hyper_.mu_prior_mean, hyper_.mu_prior_scale * s2) + log_ig;
}

void LinearGaussianModel::sample_prior(RngStream& rng, MutVec theta) const {
  theta[1] = rng.inverse_gamma(hyper_.sigma2_shape, hyper_.sigma2_scale);
  theta[0] = rng.normal(hyper_.mu_prior_mean, std::sqrt(hyper_.mu_prior_scale * theta[1]));
}

GaussianMoments LinearGaussianModel::forward_proposal(const ForwardContext& ctx,
                                                      Params theta) const {
  const double mu = theta[0];
  const GaussianMoments prior =
      ctx.prev.empty()
          ? GaussianMoments{mu, hyper_.stationary_ratio() * theta[1]}
          : GaussianMoments{mu + hyper_.phi * (ctx.prev[0] - mu), hyper_.state_noise_ratio * theta[1]};
  return condition_on(prior, ctx.y[0], theta[1]);
}

GaussianMoments LinearGaussianModel::backward_proposal(const BackwardContext& ctx,
                                                       Params theta) const {
  const double mu = theta[0];
  const GaussianMoments prior{mu + hyper_.phi * (ctx.next[0] - mu),
                              hyper_.state_noise_ratio * theta[1]};
  return condition_on(prior, ctx.y[0], theta[1]);
}

double LinearGaussianModel::propose_forward(const ForwardContext& ctx, Params theta,
                                            RngStream& rng, MutVec out) const {
  if (!valid(theta)) throw std::invalid_argument("forward proposal with invalid theta");
  if (proposal_ == LGProposal::prior) {
    const double mu = theta[0];
    if (ctx.prev.empty()) {
      out[0] = rng.normal(mu, std::sqrt(hyper_.stationary_ratio() * theta[1]));
    } else {
      out[0] = rng.normal(mu + hyper_.phi * (ctx.prev[0] - mu),
                          std::sqrt(hyper_.state_noise_ratio * theta[1]));
    }
  } else {
    const GaussianMoments g = forward_proposal(ctx, theta);
    out[0] = rng.normal(g.mean, std::sqrt(g.var));
  }
  return log_forward_proposal(ctx, theta, out);
}

double LinearGaussianModel::log_forward_proposal(const ForwardContext& ctx, Params theta,
                                                 ConstVec alpha) const {
  if (proposal_ == LGProposal::prior) {
    // Same expressions as the prior densities so that the ratio is exactly 1.
    return ctx.prev.empty() ? log_initial(alpha, theta)
                            : log_transition(alpha, ctx.prev, ctx.y_prev, theta);
  }
  const GaussianMoments g = forward_proposal(ctx, theta);
  return normal_log_pdf(alpha[0], g.mean, g.var);
}

double LinearGaussianModel::propose_backward(const BackwardContext& ctx, Params theta,
                                             RngStream& rng, MutVec out) const {
  if (!valid(theta)) throw std::invalid_argument("backward proposal with invalid theta");
  if (proposal_ == LGProposal::prior) {
    const double mu = theta[0];
    out[0] = rng.normal(mu + hyper_.phi * (ctx.next[0] - mu),
                        std::sqrt(hyper_.state_noise_ratio * theta[1]));
  } else {
    const GaussianMoments g = backward_proposal(ctx, theta);
    out[0] = rng.normal(g.mean, std::sqrt(g.var));
  }
  return log_backward_proposal(ctx, theta, out);
}

double LinearGaussianModel::log_backward_proposal(const BackwardContext& ctx, Params theta,
                                                  ConstVec alpha) const {
  if (proposal_ == LGProposal::prior) return log_backward_prior(alpha, ctx.next, theta);
  const GaussianMoments g = backward_proposal(ctx, theta);
  return normal_log_pdf(alpha[0], g.mean, g.var);
}

void LinearGaussianModel::mcmc_kernel(MutVec theta, Trajectory& path, const ObservationSeries& y,
                                      bool update_theta, RngStream& rng) const {
  const auto first = static_cast<std::size_t>(path.first() - 1);
  const std::span<const double> window(y.values().data() + first, path.size());
  LGParams p{theta[0], theta[1]};
  gibbs_kernel_lg(p, path.values(), window, hyper_, update_theta, rng);
  theta[0] = p.mu;
  theta[1] = p.sigma2;
}

SimulatedData LinearGaussianModel::simulate(Params theta, TimeIndex length, RngStream& rng) const {
  if (!valid(theta)) throw std::invalid_argument("simulate: sigma2 must be positive");
  const double mu = theta[0];
  const double s2 = theta[1];
  std::vector<double> alpha(static_cast<std::size_t>(length));
  std::vector<double> y(alpha.size());
  for (std::size_t t = 0; t < alpha.size(); ++t) {
    alpha[t] = t == 0 ? rng.normal(mu, std::sqrt(hyper_.stationary_ratio() * s2))
                      : rng.normal(mu + hyper_.phi * (alpha[t - 1] - mu),
                                   std::sqrt(hyper_.state_noise_ratio * s2));
    y[t] = rng.normal(alpha[t], std::sqrt(s2));
  }
  return {ObservationSeries(1, std::move(y)), Trajectory(1, 1, std::move(alpha))};
}

}  // namespace prmcmc

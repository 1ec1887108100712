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

#include "prmcmc/kalman.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <boost/math/distributions/inverse_gamma.hpp>
#include <boost/math/distributions/students_t.hpp>

namespace prmcmc {
namespace {

double normal_log_pdf(double x, double mean, double var) {
  const double d = x - mean;
  return -0.5 * (std::log(2.0 * std::numbers::pi * var) + d * d / var);
}

void check(LGParams theta) {
  if (!(theta.sigma2 > 0.0) || !std::isfinite(theta.sigma2) || !std::isfinite(theta.mu)) {
    throw std::invalid_argument("linear Gaussian model needs finite mu and sigma2 > 0");
  }
}

// Symmetric tridiagonal matrix factored as L D L'.
struct TridiagonalLdl {
  std::vector<double> d;
  std::vector<double> l;  // l[i] multiplies row i-1, l[0] unused

  TridiagonalLdl(const std::vector<double>& diag, double off) : d(diag.size()), l(diag.size()) {
    for (std::size_t i = 0; i < diag.size(); ++i) {
      if (i == 0) {
        d[0] = diag[0];
      } else {
        l[i] = off / d[i - 1];
        d[i] = diag[i] - l[i] * off;
      }
    }
  }

  double log_det() const {
    double sum = 0.0;
    for (double v : d) sum += std::log(v);
    return sum;
  }

  std::vector<double> solve(std::span<const double> x) const {
    const std::size_t n = d.size();
    std::vector<double> u(x.begin(), x.end());
    for (std::size_t i = 1; i < n; ++i) u[i] -= l[i] * u[i - 1];
    for (std::size_t i = 0; i < n; ++i) u[i] /= d[i];
    for (std::size_t i = n; i-- > 1;) u[i - 1] -= l[i] * u[i];
    return u;
  }
};

}  // namespace

KalmanState kalman_filter(std::span<const double> y, LGParams theta, const LGHyper& hyper,
                          std::optional<GaussianMoments> initial) {
  check(theta);
  const std::size_t T = y.size();
  const double phi = hyper.phi;
  const double q = hyper.state_noise_ratio * theta.sigma2;
  KalmanState ks;
  ks.pred_mean.resize(T);
  ks.pred_var.resize(T);
  ks.filt_mean.resize(T);
  ks.filt_var.resize(T);
  double a = initial ? initial->mean : theta.mu;
  double P = initial ? initial->var : hyper.stationary_ratio() * theta.sigma2;
  for (std::size_t t = 0; t < T; ++t) {
    ks.pred_mean[t] = a;
    ks.pred_var[t] = P;
    const double S = P + theta.sigma2;
    ks.log_likelihood += normal_log_pdf(y[t], a, S);
    const double gain = P / S;
    const double m = a + gain * (y[t] - a);
    const double Pf = P * (1.0 - gain);
    ks.filt_mean[t] = m;
    ks.filt_var[t] = Pf;
    a = theta.mu + phi * (m - theta.mu);
    P = phi * phi * Pf + q;
  }
  return ks;
}

SmoothedMoments kalman_smoother(std::span<const double> y, LGParams theta, const LGHyper& hyper,
                                std::optional<GaussianMoments> initial) {
  const KalmanState ks = kalman_filter(y, theta, hyper, initial);
  const std::size_t T = y.size();
  SmoothedMoments sm{ks.filt_mean, ks.filt_var};
  for (std::size_t t = T; t-- > 1;) {
    const std::size_t i = t - 1;
    const double J = ks.filt_var[i] * hyper.phi / ks.pred_var[t];
    sm.mean[i] = ks.filt_mean[i] + J * (sm.mean[t] - ks.pred_mean[t]);
    sm.var[i] = ks.filt_var[i] + J * J * (sm.var[t] - ks.pred_var[t]);
  }
  return sm;
}

std::vector<double> simulation_smoother(std::span<const double> y, LGParams theta,
                                        const LGHyper& hyper, RngStream& rng,
                                        std::optional<GaussianMoments> initial) {
  const std::size_t T = y.size();
  std::vector<double> alpha(T);
  if (T == 0) return alpha;
  const KalmanState ks = kalman_filter(y, theta, hyper, initial);
  alpha[T - 1] = rng.normal(ks.filt_mean[T - 1], std::sqrt(ks.filt_var[T - 1]));
  for (std::size_t t = T - 1; t-- > 0;) {
    const double J = ks.filt_var[t] * hyper.phi / ks.pred_var[t + 1];
    const double mean = ks.filt_mean[t] + J * (alpha[t + 1] - ks.pred_mean[t + 1]);
    const double var = ks.filt_var[t] * (1.0 - J * hyper.phi);
    alpha[t] = rng.normal(mean, std::sqrt(var));
  }
  return alpha;
}

double ConjugatePosterior::sigma2_mean() const {
  if (shape <= 1.0) return std::numeric_limits<double>::infinity();
  return rate / (shape - 1.0);
}

double ConjugatePosterior::mu_quantile(double p) const {
  const boost::math::students_t_distribution<double> dist(2.0 * shape);
  return mean + std::sqrt(rate * scale / shape) * boost::math::quantile(dist, p);
}

double ConjugatePosterior::sigma2_quantile(double p) const {
  const boost::math::inverse_gamma_distribution<double> dist(shape, rate);
  return boost::math::quantile(dist, p);
}

ConjugatePosterior conjugate_posterior(std::span<const double> y, const LGHyper& hyper) {
  const double a0 = hyper.sigma2_shape;
  const double b0 = hyper.sigma2_scale;
  const double m0 = hyper.mu_prior_mean;
  const double v0 = hyper.mu_prior_scale;
  ConjugatePosterior post{m0, v0, a0, b0, 0.0, y.size()};
  const std::size_t T = y.size();
  if (T == 0) return post;

  // Sigma = I + C with C the unit-scale stationary AR(1) covariance whose
  // inverse P is tridiagonal, so Sigma^{-1} = I - (I + P)^{-1}.
  const double phi = hyper.phi;
  const double q = hyper.state_noise_ratio;
  std::vector<double> diag(T, (1.0 + phi * phi) / q);
  if (T == 1) {
    diag[0] = (1.0 - phi * phi) / q;
  } else {
    diag.front() = 1.0 / q;
    diag.back() = 1.0 / q;
  }
  const double off = -phi / q;
  const double log_det_P = -(std::log(q / (1.0 - phi * phi)) + static_cast<double>(T - 1) * std::log(q));
  for (double& v : diag) v += 1.0;
  const TridiagonalLdl ipp(diag, off);
  const double log_det_sigma = ipp.log_det() - log_det_P;

  const std::vector<double> ones(T, 1.0);
  const std::vector<double> solve_1 = ipp.solve(ones);
  const std::vector<double> solve_y = ipp.solve(y);
  double one_si_one = 0.0;
  double one_si_y = 0.0;
  double y_si_y = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    one_si_one += 1.0 - solve_1[t];
    one_si_y += y[t] - solve_y[t];
    y_si_y += y[t] * (y[t] - solve_y[t]);
  }

  post.scale = 1.0 / (1.0 / v0 + one_si_one);
  post.mean = post.scale * (m0 / v0 + one_si_y);
  post.shape = a0 + 0.5 * static_cast<double>(T);
  post.rate = b0 + 0.5 * (y_si_y + m0 * m0 / v0 - post.mean * post.mean / post.scale);
  post.log_marginal = -0.5 * static_cast<double>(T) * std::log(2.0 * std::numbers::pi) -
                      0.5 * log_det_sigma + 0.5 * std::log(post.scale / v0) + a0 * std::log(b0) -
                      post.shape * std::log(post.rate) + std::lgamma(post.shape) - std::lgamma(a0);
  return post;
}

void gibbs_kernel_lg(LGParams& theta, std::span<double> alpha, std::span<const double> y,
                     const LGHyper& hyper, bool update_theta, RngStream& rng) {
  const std::size_t T = y.size();
  if (alpha.size() != T) throw std::invalid_argument("gibbs_kernel_lg: state/observation size mismatch");
  if (T == 0) return;
  const std::vector<double> draw = simulation_smoother(y, theta, hyper, rng);
  std::copy(draw.begin(), draw.end(), alpha.begin());
  if (!update_theta) return;

  // The stationary AR(1) quadratic form in mu: A mu^2 - 2 B mu + C.
  const double phi = hyper.phi;
  const double q = hyper.state_noise_ratio;
  const double w1 = 1.0 - phi * phi;
  double A = w1;
  double B = w1 * alpha[0];
  double C = w1 * alpha[0] * alpha[0];
  double sum_obs = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    const double e = y[t] - alpha[t];
    sum_obs += e * e;
    if (t > 0) {
      const double d = alpha[t] - phi * alpha[t - 1];
      A += (1.0 - phi) * (1.0 - phi);
      B += (1.0 - phi) * d;
      C += d * d;
    }
  }
  A /= q;
  B /= q;
  C /= q;
  const double m0 = hyper.mu_prior_mean;
  const double v0 = hyper.mu_prior_scale;
  const double vn = 1.0 / (1.0 / v0 + A);
  const double mn = vn * (m0 / v0 + B);
  const double shape = hyper.sigma2_shape + static_cast<double>(T);
  const double rate = hyper.sigma2_scale + 0.5 * (sum_obs + C + m0 * m0 / v0 - mn * mn / vn);
  theta.sigma2 = rng.inverse_gamma(shape, rate);
  theta.mu = rng.normal(mn, std::sqrt(vn * theta.sigma2));
}

}  // namespace prmcmc

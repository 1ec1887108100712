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

#include "prmcmc/rsv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "prmcmc/errors.hpp"

namespace prmcmc {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

enum Index { kMu = 0, kPhi, kSigmaEta2, kXi, kSigmaU2, kRho };

double normal_log_pdf(double x, double mean, double var) {
  const double d = x - mean;
  return -0.5 * (std::log(2.0 * std::numbers::pi * var) + d * d / var);
}

double log_inverse_gamma(double x, double shape, double scale) {
  return shape * std::log(scale) - std::lgamma(shape) - (shape + 1.0) * std::log(x) - scale / x;
}

bool valid(Params th) {
  for (double v : th) {
    if (!std::isfinite(v)) return false;
  }
  return std::abs(th[kPhi]) < 1.0 && th[kSigmaEta2] > 0.0 && th[kSigmaU2] > 0.0 &&
         std::abs(th[kRho]) < 1.0;
}

double stationary_var(Params th) { return th[kSigmaEta2] / (1.0 - th[kPhi] * th[kPhi]); }

// Mean and variance of alpha_{t+1} given alpha_t, optionally also given y1_t.
StateProposal transition_moments(double alpha, ConstVec y, Params th) {
  const double mean = th[kMu] + th[kPhi] * (alpha - th[kMu]);
  if (y.empty()) return {mean, th[kSigmaEta2]};
  const double sd = std::sqrt(th[kSigmaEta2]);
  const double eps = y[0] * std::exp(-0.5 * alpha);
  return {mean + th[kRho] * sd * eps, th[kSigmaEta2] * (1.0 - th[kRho] * th[kRho])};
}

}  // namespace

RsvModel::RsvModel(RsvHyper hyper) : hyper_(hyper) {
  if (!(hyper_.mu_var > 0.0) || !(hyper_.phi_beta_a > 0.0) || !(hyper_.phi_beta_b > 0.0) ||
      !(hyper_.sigma_eta2_shape > 0.0) || !(hyper_.sigma_eta2_scale > 0.0) ||
      !(hyper_.xi_var > 0.0) || !(hyper_.sigma_u2_shape > 0.0) || !(hyper_.sigma_u2_scale > 0.0) ||
      !(hyper_.state_block_mean >= 1.0)) {
    throw std::invalid_argument("invalid RSV hyperparameters");
  }
}

double RsvModel::log_obs(ConstVec y, ConstVec alpha, ConstVec alpha_next, Params th) const {
  if (!valid(th)) return kNegInf;
  const double a = alpha[0];
  const double log_y2 = normal_log_pdf(y[1], a + th[kXi], th[kSigmaU2]);
  if (alpha_next.empty()) return normal_log_pdf(y[0], 0.0, std::exp(a)) + log_y2;
  const double rho = th[kRho];
  const double eta = alpha_next[0] - th[kMu] - th[kPhi] * (a - th[kMu]);
  const double mean = std::exp(0.5 * a) * rho * eta / std::sqrt(th[kSigmaEta2]);
  return normal_log_pdf(y[0], mean, std::exp(a) * (1.0 - rho * rho)) + log_y2;
}

double RsvModel::log_transition(ConstVec alpha_next, ConstVec alpha, ConstVec y, Params th) const {
  if (!valid(th)) return kNegInf;
  const StateProposal m = transition_moments(alpha[0], y, th);
  return normal_log_pdf(alpha_next[0], m.mean, m.var);
}

double RsvModel::log_initial(ConstVec alpha, Params th) const {
  if (!valid(th)) return kNegInf;
  return normal_log_pdf(alpha[0], th[kMu], stationary_var(th));
}

double RsvModel::log_backward_prior(ConstVec alpha_prev, ConstVec alpha, Params th) const {
  if (!valid(th)) return kNegInf;
  return normal_log_pdf(alpha_prev[0], th[kMu] + th[kPhi] * (alpha[0] - th[kMu]), th[kSigmaEta2]);
}

double RsvModel::log_prior(Params th) const {
  if (!valid(th)) return kNegInf;
  const double u = 0.5 * (th[kPhi] + 1.0);
  const double a = hyper_.phi_beta_a;
  const double b = hyper_.phi_beta_b;
  const double log_phi = (a - 1.0) * std::log(u) + (b - 1.0) * std::log1p(-u) + std::lgamma(a + b) -
                         std::lgamma(a) - std::lgamma(b) - std::log(2.0);
  return normal_log_pdf(th[kMu], hyper_.mu_mean, hyper_.mu_var) + log_phi +
         log_inverse_gamma(th[kSigmaEta2], hyper_.sigma_eta2_shape, hyper_.sigma_eta2_scale) +
         normal_log_pdf(th[kXi], hyper_.xi_mean, hyper_.xi_var) +
         log_inverse_gamma(th[kSigmaU2], hyper_.sigma_u2_shape, hyper_.sigma_u2_scale) -
         std::log(2.0);
}

void RsvModel::sample_prior(RngStream& rng, MutVec th) const {
  th[kMu] = rng.normal(hyper_.mu_mean, std::sqrt(hyper_.mu_var));
  th[kPhi] = 2.0 * rng.beta(hyper_.phi_beta_a, hyper_.phi_beta_b) - 1.0;
  th[kSigmaEta2] = rng.inverse_gamma(hyper_.sigma_eta2_shape, hyper_.sigma_eta2_scale);
  th[kXi] = rng.normal(hyper_.xi_mean, std::sqrt(hyper_.xi_var));
  th[kSigmaU2] = rng.inverse_gamma(hyper_.sigma_u2_shape, hyper_.sigma_u2_scale);
  th[kRho] = 2.0 * rng.uniform() - 1.0;
}

StateProposal RsvModel::state_proposal(ConstVec prev, ConstVec y_prev, ConstVec next, ConstVec y,
                                       Params th) const {
  const double mu = th[kMu];
  const double phi = th[kPhi];
  const double s2 = th[kSigmaEta2];
  const double rho = th[kRho];

  const StateProposal prior =
      prev.empty() ? StateProposal{mu, stationary_var(th)} : transition_moments(prev[0], y_prev, th);
  double precision = 1.0 / prior.var;
  double linear = prior.mean / prior.var;
  if (!next.empty()) {
    precision += phi * phi / s2;
    linear += phi * (next[0] - mu * (1.0 - phi)) / s2;
  }
  precision += 1.0 / th[kSigmaU2];
  linear += (y[1] - th[kXi]) / th[kSigmaU2];
  const double m0 = linear / precision;
  if (!std::isfinite(m0)) throw DegenerateProposal("RSV proposal expansion point is not finite");

  // Return term as c - a/2 - z^2 / (2 w) with z = y1 exp(-a/2) - rho eta / sd.
  const double e = y[0] * std::exp(-0.5 * m0);
  double z = e;
  double dz = -0.5 * e;
  double w = 1.0;
  if (!next.empty()) {
    const double sd = std::sqrt(s2);
    const double eta = next[0] - mu - phi * (m0 - mu);
    z -= rho * eta / sd;
    dz += rho * phi / sd;
    w = 1.0 - rho * rho;
  }
  const double d2z = 0.25 * e;
  const double grad = -0.5 - z * dz / w;
  const double curv = -(dz * dz + z * d2z) / w;
  const double p = precision - curv;
  if (p > 0.0 && std::isfinite(p) && std::isfinite(grad)) return {m0 + grad / p, 1.0 / p};
  return {m0, 1.0 / precision};
}

double RsvModel::propose_forward(const ForwardContext& ctx, Params th, RngStream& rng,
                                 MutVec out) const {
  if (!valid(th)) throw std::invalid_argument("forward proposal with invalid theta");
  const StateProposal g = state_proposal(ctx.prev, ctx.y_prev, ConstVec{}, ctx.y, th);
  out[0] = rng.normal(g.mean, std::sqrt(g.var));
  return normal_log_pdf(out[0], g.mean, g.var);
}

double RsvModel::log_forward_proposal(const ForwardContext& ctx, Params th, ConstVec alpha) const {
  if (!valid(th)) return kNegInf;
  const StateProposal g = state_proposal(ctx.prev, ctx.y_prev, ConstVec{}, ctx.y, th);
  return normal_log_pdf(alpha[0], g.mean, g.var);
}

double RsvModel::propose_backward(const BackwardContext& ctx, Params th, RngStream& rng,
                                  MutVec out) const {
  if (!valid(th)) throw std::invalid_argument("backward proposal with invalid theta");
  const StateProposal g = state_proposal(ConstVec{}, ConstVec{}, ctx.next, ctx.y, th);
  out[0] = rng.normal(g.mean, std::sqrt(g.var));
  return normal_log_pdf(out[0], g.mean, g.var);
}

double RsvModel::log_backward_proposal(const BackwardContext& ctx, Params th,
                                       ConstVec alpha) const {
  if (!valid(th)) return kNegInf;
  const StateProposal g = state_proposal(ConstVec{}, ConstVec{}, ctx.next, ctx.y, th);
  return normal_log_pdf(alpha[0], g.mean, g.var);
}

void RsvModel::update_states(Params th, Trajectory& path, const ObservationSeries& y,
                             RngStream& rng) const {
  const TimeIndex s = path.first();
  const TimeIndex t = path.last();
  const ConstVec none;
  const std::size_t max_len = static_cast<std::size_t>(2.0 * hyper_.state_block_mean);
  std::vector<double> proposal;
  TimeIndex a = s;
  while (a <= t) {
    const auto len = 1 + static_cast<TimeIndex>(rng.uniform() * static_cast<double>(max_len));
    const TimeIndex b = std::min(t, a + len - 1);
    proposal.assign(static_cast<std::size_t>(b - a + 1), 0.0);
    const ConstVec next = b < t ? path.at(b + 1) : none;

    // Proposal density of a block (forward proposals, the last state also
    // conditioned on alpha_{b+1}) and the target factors it touches.
    auto block_terms = [&](auto state_at, bool draw) {
      double log_q = 0.0;
      double log_pi = 0.0;
      for (TimeIndex j = a; j <= b; ++j) {
        const ConstVec prev = j > s ? state_at(j - 1) : none;
        const ConstVec y_prev = j > s ? y.at(j - 1) : none;
        const StateProposal g = state_proposal(prev, y_prev, j == b ? next : none, y.at(j), th);
        if (draw) proposal[static_cast<std::size_t>(j - a)] = rng.normal(g.mean, std::sqrt(g.var));
        const ConstVec cur = state_at(j);
        log_q += normal_log_pdf(cur[0], g.mean, g.var);
        log_pi += (j > s ? log_transition(cur, prev, y_prev, th) : log_initial(cur, th)) +
                  log_obs(y.at(j), cur, none, th);
      }
      if (b < t) log_pi += log_transition(next, state_at(b), y.at(b), th);
      return log_pi - log_q;
    };
    auto current_at = [&](TimeIndex j) { return std::as_const(path).at(j); };
    auto proposed_at = [&](TimeIndex j) {
      return j >= a ? ConstVec(proposal).subspan(static_cast<std::size_t>(j - a), 1)
                    : std::as_const(path).at(j);
    };
    const double log_new = block_terms(proposed_at, true);
    const double log_old = block_terms(current_at, false);
    if (std::log(rng.uniform()) < log_new - log_old) {
      for (TimeIndex j = a; j <= b; ++j) path.at(j)[0] = proposal[static_cast<std::size_t>(j - a)];
    }
    a = b + 1;
  }
}

double RsvModel::log_state_density(Params th, const Trajectory& path,
                                   const ObservationSeries& y) const {
  double sum = log_initial(path.at(path.first()), th);
  for (TimeIndex j = path.first(); j < path.last(); ++j) {
    sum += log_transition(path.at(j + 1), path.at(j), y.at(j), th);
  }
  return sum;
}

void RsvModel::update_parameters(MutVec th, const Trajectory& path, const ObservationSeries& y,
                                 RngStream& rng) const {
  const TimeIndex s = path.first();
  const TimeIndex t = path.last();
  const double n = static_cast<double>(path.size());

  // xi | sigma_u2 and sigma_u2 | xi from the y2 equation.
  double sum_r = 0.0;
  for (TimeIndex j = s; j <= t; ++j) sum_r += y.at(j)[1] - path.at(j)[0];
  {
    const double prec = 1.0 / hyper_.xi_var + n / th[kSigmaU2];
    const double mean = (hyper_.xi_mean / hyper_.xi_var + sum_r / th[kSigmaU2]) / prec;
    th[kXi] = rng.normal(mean, std::sqrt(1.0 / prec));
  }
  double ss = 0.0;
  for (TimeIndex j = s; j <= t; ++j) {
    const double r = y.at(j)[1] - path.at(j)[0] - th[kXi];
    ss += r * r;
  }
  th[kSigmaU2] = rng.inverse_gamma(hyper_.sigma_u2_shape + 0.5 * n, hyper_.sigma_u2_scale + 0.5 * ss);

  // mu | rest: Gaussian from the stationary start and the leverage-adjusted
  // transitions.
  {
    const double phi = th[kPhi];
    const double s2 = th[kSigmaEta2];
    const double rho = th[kRho];
    const double sd = std::sqrt(s2);
    const double cond_var = s2 * (1.0 - rho * rho);
    double prec = 1.0 / hyper_.mu_var + (1.0 - phi * phi) / s2;
    double lin = hyper_.mu_mean / hyper_.mu_var + (1.0 - phi * phi) * path.at(s)[0] / s2;
    for (TimeIndex j = s; j < t; ++j) {
      const double a = path.at(j)[0];
      const double eps = y.at(j)[0] * std::exp(-0.5 * a);
      const double r = path.at(j + 1)[0] - phi * a - rho * sd * eps;
      prec += (1.0 - phi) * (1.0 - phi) / cond_var;
      lin += (1.0 - phi) * r / cond_var;
    }
    th[kMu] = rng.normal(lin / prec, std::sqrt(1.0 / prec));
  }

  // phi, sigma_eta2, rho: random-walk MH on unconstrained scales. The
  // Jacobian of each transform enters the target.
  auto log_target = [&](Params cand) {
    const double lp = log_prior(cand);
    if (lp == kNegInf) return kNegInf;
    return lp + log_state_density(cand, path, y) + std::log1p(-cand[kPhi] * cand[kPhi]) +
           std::log(cand[kSigmaEta2]) + std::log1p(-cand[kRho] * cand[kRho]);
  };
  std::vector<double> cand(th.begin(), th.end());
  double current = log_target(th);
  auto step = [&](int index, double size, bool log_scale) {
    std::copy(th.begin(), th.end(), cand.begin());
    const double z = rng.normal();
    cand[index] = log_scale ? std::exp(std::log(th[index]) + size * z)
                            : std::tanh(std::atanh(th[index]) + size * z);
    const double proposed = log_target(cand);
    if (std::log(rng.uniform()) < proposed - current) {
      th[index] = cand[index];
      current = proposed;
    }
  };
  step(kPhi, hyper_.step_phi, false);
  step(kSigmaEta2, hyper_.step_log_sigma_eta2, true);
  step(kRho, hyper_.step_rho, false);
}

void RsvModel::mcmc_kernel(MutVec theta, Trajectory& path, const ObservationSeries& y,
                           bool update_theta, RngStream& rng) const {
  if (path.empty()) return;
  update_states(theta, path, y, rng);
  if (update_theta) {
    update_parameters(theta, path, y, rng);
    shift_level(theta, path, y, rng);
  }
}

// The y2 equation pins alpha + xi, so alpha's level and xi are strongly
// dependent; the translation keeps alpha + xi and alpha - mu fixed.
void RsvModel::shift_level(MutVec th, Trajectory& path, const ObservationSeries& y,
                           RngStream& rng) const {
  const double current = log_joint(*this, th, path, y);
  const double d = hyper_.step_level * rng.normal();
  std::vector<double> cand(th.begin(), th.end());
  cand[kMu] += d;
  cand[kXi] -= d;
  Trajectory moved = path;
  for (double& a : moved.values()) a += d;
  const double proposed = log_joint(*this, cand, moved, y);
  if (std::log(rng.uniform()) < proposed - current) {
    std::copy(cand.begin(), cand.end(), th.begin());
    path = std::move(moved);
  }
}

SimulatedData RsvModel::simulate(Params th, TimeIndex length, RngStream& rng) const {
  if (!valid(th)) throw std::invalid_argument("simulate: invalid RSV parameters");
  const auto T = static_cast<std::size_t>(length);
  std::vector<double> alpha(T);
  std::vector<double> y(2 * T);
  const double sd = std::sqrt(th[kSigmaEta2]);
  const double rho = th[kRho];
  double a = rng.normal(th[kMu], std::sqrt(stationary_var(th)));
  for (std::size_t t = 0; t < T; ++t) {
    alpha[t] = a;
    const double eps = rng.normal();
    const double eta = sd * (rho * eps + std::sqrt(1.0 - rho * rho) * rng.normal());
    y[2 * t] = std::exp(0.5 * a) * eps;
    y[2 * t + 1] = a + th[kXi] + std::sqrt(th[kSigmaU2]) * rng.normal();
    a = th[kMu] + th[kPhi] * (a - th[kMu]) + eta;
  }
  return {ObservationSeries(2, std::move(y)), Trajectory(1, 1, std::move(alpha))};
}

}  // namespace prmcmc

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

#include <gtest/gtest.h>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/inverse_gamma.hpp>
#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <limits>
#include <vector>

#include "dense_gaussian.hpp"
#include "prmcmc/linear_gaussian.hpp"
#include "prmcmc/rng.hpp"
#include "prmcmc/rsv.hpp"
#include "prmcmc/state_space.hpp"

namespace prmcmc {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double lg_log_prior(double mu, double sigma2) {
  const boost::math::inverse_gamma_distribution<> ig(2.5, 0.025);
  return std::log(boost::math::pdf(ig, sigma2)) + oracle::normal_log_pdf(mu, 0.0, 10.0 * sigma2);
}

double lg_oracle_joint(double mu, double sigma2, const std::vector<double>& alpha,
                       const std::vector<double>& y) {
  const oracle::LG m{mu, sigma2};
  const int n = static_cast<int>(alpha.size());
  double lp = lg_log_prior(mu, sigma2) +
              oracle::mvn_log_pdf(oracle::to_vector(alpha), oracle::state_mean(n, m),
                                  oracle::state_cov(n, m));
  for (int i = 0; i < n; ++i) lp += oracle::normal_log_pdf(y[i], alpha[i], sigma2);
  return lp;
}

// theta = (mu, phi, sigma_eta2, xi, sigma_u2, rho)
double rsv_log_prior(const std::vector<double>& th) {
  using namespace boost::math;
  const double lp_mu = std::log(pdf(normal_distribution<>(0.0, std::sqrt(10.0)), th[0]));
  const double lp_phi =
      std::log(pdf(beta_distribution<>(20.0, 1.5), (th[1] + 1.0) / 2.0)) - std::log(2.0);
  const double lp_se = std::log(pdf(inverse_gamma_distribution<>(2.5, 0.025), th[2]));
  const double lp_xi = std::log(pdf(normal_distribution<>(0.0, std::sqrt(10.0)), th[3]));
  const double lp_su = std::log(pdf(inverse_gamma_distribution<>(2.5, 0.025), th[4]));
  const double lp_rho = std::log(0.5);
  return lp_mu + lp_phi + lp_se + lp_xi + lp_su + lp_rho;
}

// Joint density built from the bivariate normal of (eps_t, eta_t).
double rsv_oracle_joint(const std::vector<double>& th, const std::vector<double>& alpha,
                        const std::vector<double>& y) {
  const double mu = th[0], phi = th[1], se2 = th[2], xi = th[3], su2 = th[4], rho = th[5];
  const std::size_t n = alpha.size();
  double lp = rsv_log_prior(th) + oracle::normal_log_pdf(alpha[0], mu, se2 / (1.0 - phi * phi));
  Eigen::Matrix2d cov;
  cov << 1.0, rho * std::sqrt(se2), rho * std::sqrt(se2), se2;
  for (std::size_t t = 0; t < n; ++t) {
    const double y1 = y[2 * t];
    const double y2 = y[2 * t + 1];
    const double eps = y1 * std::exp(-alpha[t] / 2.0);
    lp += oracle::normal_log_pdf(y2, alpha[t] + xi, su2);
    if (t + 1 < n) {
      const double eta = alpha[t + 1] - mu - phi * (alpha[t] - mu);
      lp += oracle::mvn_log_pdf(Eigen::Vector2d(eps, eta), Eigen::Vector2d::Zero(), cov) -
            alpha[t] / 2.0;
    } else {
      lp += oracle::normal_log_pdf(y1, 0.0, std::exp(alpha[t]));
    }
  }
  return lp;
}

TEST(ObservationSeries, AtAndSlice) {
  const ObservationSeries y(2, {1, 2, 3, 4, 5, 6});
  EXPECT_EQ(y.length(), 3);
  EXPECT_EQ(y.at(2)[0], 3.0);
  EXPECT_EQ(y.at(2)[1], 4.0);
  const auto s = y.slice(2, 3);
  EXPECT_EQ(s.length(), 2);
  EXPECT_EQ(s.at(1)[0], 3.0);
}

TEST(Trajectory, PushDropAndIndexing) {
  Trajectory path(5, 1);
  for (double v : {1.0, 2.0, 3.0}) path.push_back(std::vector<double>{v});
  EXPECT_EQ(path.first(), 5);
  EXPECT_EQ(path.last(), 7);
  EXPECT_EQ(path.at(6)[0], 2.0);
  path.drop_front();
  EXPECT_EQ(path.first(), 6);
  EXPECT_EQ(path.size(), 2u);
  EXPECT_FALSE(path.contains(5));
}

TEST(LogJoint, LinearGaussianMatchesDenseGaussian) {
  const LinearGaussianModel model;
  RngStream rng(1, {0, 0, 0});
  for (int rep = 0; rep < 5; ++rep) {
    const int n = 3 + rep;
    const double mu = rng.normal(0.5, 0.5);
    const double sigma2 = 0.02 + 0.1 * rng.uniform();
    std::vector<double> alpha(n), yv(n);
    for (int i = 0; i < n; ++i) {
      alpha[i] = rng.normal(mu, 0.4);
      yv[i] = rng.normal(alpha[i], 0.3);
    }
    const std::vector<double> theta{mu, sigma2};
    const double got = log_joint(model, theta, Trajectory(1, 1, alpha), ObservationSeries(1, yv));
    EXPECT_NEAR(got, lg_oracle_joint(mu, sigma2, alpha, yv), 1e-9);
  }
}

TEST(LogJoint, WindowOfLengthOne) {
  const LinearGaussianModel model;
  const std::vector<double> theta{0.3, 0.07};
  const std::vector<double> alpha{0.1};
  const std::vector<double> yv{0.4};
  const double got = log_joint(model, theta, Trajectory(1, 1, alpha), ObservationSeries(1, yv));
  const double expected = lg_log_prior(0.3, 0.07) +
                          oracle::normal_log_pdf(0.1, 0.3, 0.07 * 2.0 / (1.0 - 0.0625)) +
                          oracle::normal_log_pdf(0.4, 0.1, 0.07);
  EXPECT_NEAR(got, expected, 1e-12);
}

TEST(LogJoint, WindowNotStartingAtOne) {
  const LinearGaussianModel model;
  const std::vector<double> theta{0.3, 0.07};
  const std::vector<double> alpha{0.1, 0.2};
  const ObservationSeries y(1, {9.0, 9.0, 0.4, 0.5});
  const double got = log_joint(model, theta, Trajectory(3, 1, alpha), y);
  EXPECT_NEAR(got, lg_oracle_joint(0.3, 0.07, alpha, {0.4, 0.5}), 1e-12);
}

TEST(LogJoint, OutOfSupportThetaIsNegInf) {
  const LinearGaussianModel model;
  const Trajectory path(1, 1, {0.0});
  const ObservationSeries y(1, {0.0});
  EXPECT_EQ(log_joint(model, std::vector<double>{0.0, 0.0}, path, y), kNegInf);
  EXPECT_EQ(log_joint(model, std::vector<double>{0.0, -1.0}, path, y), kNegInf);
  const RsvModel rsv;
  const Trajectory rpath(1, 1, {0.0});
  const ObservationSeries ry(2, {0.1, 0.0});
  EXPECT_EQ(log_joint(rsv, std::vector<double>{0, 1.2, 0.02, 0, 0.05, 0}, rpath, ry), kNegInf);
  EXPECT_EQ(log_joint(rsv, std::vector<double>{0, 0.9, 0.02, 0, 0.05, -1.5}, rpath, ry), kNegInf);
}

TEST(LogJoint, RsvMatchesBivariateNormalConstruction) {
  const RsvModel model;
  RngStream rng(2, {0, 0, 0});
  const std::vector<double> theta{0.1, 0.95, 0.03, -0.2, 0.06, -0.5};
  for (int rep = 0; rep < 5; ++rep) {
    const int n = 2 + rep;
    std::vector<double> alpha(n), yv(2 * n);
    for (int i = 0; i < n; ++i) {
      alpha[i] = rng.normal(0.0, 0.5);
      yv[2 * i] = rng.normal(0.0, 1.0);
      yv[2 * i + 1] = rng.normal(alpha[i], 0.3);
    }
    const double got = log_joint(model, theta, Trajectory(1, 1, alpha), ObservationSeries(2, yv));
    EXPECT_NEAR(got, rsv_oracle_joint(theta, alpha, yv), 1e-9);
  }
}

TEST(Factorization, ForwardEqualsBackwardLinearGaussian) {
  const LinearGaussianModel model;
  RngStream rng(3, {0, 0, 0});
  for (int rep = 0; rep < 10; ++rep) {
    const int n = 1 + rep;
    std::vector<double> alpha(n), yv(n);
    for (int i = 0; i < n; ++i) {
      alpha[i] = rng.normal(1.0, 0.5);
      yv[i] = rng.normal(alpha[i], 0.3);
    }
    const std::vector<double> theta{rng.normal(1.0, 0.3), 0.03 + 0.05 * rng.uniform()};
    const Trajectory path(4, 1, alpha);
    std::vector<double> padded(3, 0.0);
    padded.insert(padded.end(), yv.begin(), yv.end());
    const ObservationSeries y(1, padded);
    EXPECT_NEAR(log_joint(model, theta, path, y),
                backward_factorized_log_joint(model, theta, path, y), 1e-8);
  }
}

TEST(Factorization, ForwardEqualsBackwardRsv) {
  const RsvModel model;
  RngStream rng(4, {0, 0, 0});
  for (int rep = 0; rep < 10; ++rep) {
    const int n = 1 + rep;
    std::vector<double> alpha(n), yv(2 * n);
    for (int i = 0; i < n; ++i) {
      alpha[i] = rng.normal(0.0, 0.5);
      yv[2 * i] = rng.normal(0.0, 1.0);
      yv[2 * i + 1] = rng.normal(alpha[i], 0.3);
    }
    const std::vector<double> theta{rng.normal(0.0, 0.3), 0.9 + 0.09 * rng.uniform(),
                                    0.01 + 0.05 * rng.uniform(), rng.normal(0.0, 0.3),
                                    0.02 + 0.05 * rng.uniform(), -0.9 + 1.8 * rng.uniform()};
    const Trajectory path(1, 1, alpha);
    const ObservationSeries y(2, yv);
    EXPECT_NEAR(log_joint(model, theta, path, y),
                backward_factorized_log_joint(model, theta, path, y), 1e-8);
  }
}

}  // namespace
}  // namespace prmcmc

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

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <vector>

#include "dense_gaussian.hpp"
#include "prmcmc/backward_block.hpp"
#include "prmcmc/linear_gaussian.hpp"
#include "prmcmc/rng.hpp"
#include "stats.hpp"
#include "toy_models.hpp"

namespace prmcmc {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

const oracle::LG kLG{1.0, 0.05};
const std::vector<double> kTheta{1.0, 0.05};

std::vector<double> test_observations() {
  return {1.21, 0.74, 1.05, 1.48, 0.93, 0.66, 1.12, 1.30, 0.88, 1.02};
}

TEST(InnerWeightBackward, BackwardPriorProposalLeavesObservationDensity) {
  const LinearGaussianModel model(LGProposal::prior);
  const std::vector<double> next{0.8}, y{1.3};
  const BackwardContext ctx{4, next, y};
  for (double a : {-1.0, 0.3, 1.7}) {
    const std::vector<double> alpha{a};
    EXPECT_NEAR(inner_weight_backward(model, ctx, alpha, kTheta),
                oracle::normal_log_pdf(y[0], a, kLG.sigma2), 1e-10);
  }
}

TEST(InnerWeightBackward, FullyAdaptedIsConstant) {
  const LinearGaussianModel model(LGProposal::fully_adapted);
  const std::vector<double> next{0.8}, y{1.3};
  const BackwardContext ctx{4, next, y};
  const double m = kLG.mu + kLG.phi * (next[0] - kLG.mu);
  const double expected = oracle::normal_log_pdf(y[0], m, kLG.q() + kLG.sigma2);
  for (double a : {-1.0, 0.3, 1.0, 1.7, 4.0}) {
    const std::vector<double> alpha{a};
    EXPECT_NEAR(inner_weight_backward(model, ctx, alpha, kTheta), expected, 1e-10);
  }
}

TEST(InnerWeightBackward, MatchesGaussianDensityRatio) {
  const LinearGaussianModel model(LGProposal::prior);
  const std::vector<double> next{0.8}, y{1.3}, alpha{1.1};
  const BackwardContext ctx{4, next, y};
  const double m = kLG.mu + kLG.phi * (next[0] - kLG.mu);
  const double expected = oracle::normal_log_pdf(alpha[0], m, kLG.q()) +
                          oracle::normal_log_pdf(y[0], alpha[0], kLG.sigma2) + 0.5;
  EXPECT_NEAR(inner_weight_backward(model, ctx, alpha, -0.5, kTheta), expected, 1e-10);
}

TEST(BackwardBlockMove, SingleCandidateIsSimpleStep) {
  const LinearGaussianModel model(LGProposal::prior);
  const ObservationSeries y(1, test_observations());
  const Trajectory path(2, 1, {0.9, 1.1, 0.95, 1.2, 1.0, 0.8});
  RngStream rng(21, {3, 8, 5});
  RngStream twin = rng;
  const auto r = backward_block_move(model, kTheta, path, y, {2, 1, true}, rng);
  EXPECT_EQ(r.first_time, 3);
  ASSERT_EQ(r.head.size(), 2u);
  EXPECT_EQ(r.head[0], path.at(3)[0]);
  EXPECT_EQ(r.head[1], path.at(4)[0]);
  EXPECT_EQ(r.log_phat_old, model.log_obs(y.at(2), path.at(2), path.at(3), kTheta));
  EXPECT_EQ(rng(), twin());
}

TEST(BackwardBlockMove, HeadHasBlockLength) {
  const LinearGaussianModel model;
  const ObservationSeries y(1, test_observations());
  const Trajectory path(1, 1, {0.9, 1.1, 0.95, 1.2, 1.0, 0.8});
  for (std::size_t K : {0u, 1u, 2u, 4u}) {
    RngStream rng(22, {static_cast<std::uint32_t>(K), 0, 0});
    const auto r = backward_block_move(model, kTheta, path, y, {K, 5, true}, rng);
    EXPECT_EQ(r.head.size(), K);
    EXPECT_TRUE(std::isfinite(r.log_phat_old));
  }
  RngStream rng(22, {9, 0, 0});
  EXPECT_THROW(backward_block_move(model, kTheta, path, y, {5, 5, true}, rng),
               std::invalid_argument);
}

TEST(BackwardBlockMove, PinnedPathPreserved) {
  const LinearGaussianModel model;
  const ObservationSeries y(1, test_observations());
  const Trajectory path(1, 1, {0.91, 1.13, 0.97, 1.24, 1.01, 0.87});
  RngStream rng(23, {0, 0, 0});
  BlockWorkspace ws;
  backward_block_move(model, kTheta, path, y, {3, 6, true}, rng, ws);
  for (std::size_t c = 0; c <= 3; ++c) {
    const double pinned = ws.state(c, 0)[0];
    const double original = path.at(1 + static_cast<TimeIndex>(c))[0];
    EXPECT_EQ(std::memcmp(&pinned, &original, sizeof(double)), 0);
  }
  for (std::size_t c = 0; c < 3; ++c) EXPECT_EQ(ws.parent(c, 0), 0u);
}

TEST(BackwardBlockMove, LineageFollowsParentsWithoutSmoother) {
  const LinearGaussianModel model(LGProposal::prior);
  const ObservationSeries y(1, test_observations());
  const Trajectory path(1, 1, {0.9, 1.1, 0.95, 1.2, 1.0, 0.8});
  for (std::uint32_t rep = 0; rep < 20; ++rep) {
    RngStream rng(24, {rep, 0, 0});
    BlockWorkspace ws;
    const auto r = backward_block_move(model, kTheta, path, y, {3, 5, false}, rng, ws);
    std::size_t k = ws.lineage[1];
    for (std::size_t c = 1; c <= 3; ++c) {
      EXPECT_EQ(r.head[c - 1], ws.state(c, k)[0]);
      if (c < 3) k = ws.parent(c, k);
    }
  }
}

TEST(BackwardBlockMove, SmootherLeavesEstimateUnchanged) {
  const LinearGaussianModel model(LGProposal::prior);
  const ObservationSeries y(1, test_observations());
  const Trajectory path(1, 1, {0.9, 1.1, 0.95, 1.2, 1.0, 0.8});
  for (std::uint32_t rep = 0; rep < 10; ++rep) {
    RngStream a(25, {rep, 0, 0});
    RngStream b(25, {rep, 0, 0});
    const auto on = backward_block_move(model, kTheta, path, y, {3, 8, true}, a);
    const auto off = backward_block_move(model, kTheta, path, y, {3, 8, false}, b);
    EXPECT_EQ(on.log_phat_old, off.log_phat_old);
  }
}

TEST(BackwardBlockMove, EstimateDependsOnlyOnAnchor) {
  const LinearGaussianModel model;
  const ObservationSeries y(1, test_observations());
  const Trajectory a(1, 1, {0.9, 1.1, 0.95, 1.2, 1.0, 0.8});
  const Trajectory b(1, 1, {0.9, 1.1, 0.95, 1.2, -3.0, 7.5});
  RngStream ra(26, {0, 0, 0});
  RngStream rb(26, {0, 0, 0});
  const auto x = backward_block_move(model, kTheta, a, y, {2, 8, true}, ra);
  const auto z = backward_block_move(model, kTheta, b, y, {2, 8, true}, rb);
  EXPECT_EQ(x.log_phat_old, z.log_phat_old);
  EXPECT_EQ(x.head, z.head);
}

TEST(BackwardBlockMove, InverseEstimateIsUnbiased) {
  const LinearGaussianModel model(LGProposal::prior);
  const auto yv = test_observations();
  const ObservationSeries y(1, yv);
  const std::size_t K = 2;
  const double anchor = 1.15;  // alpha_{s+K}; s-1 = 1
  // Reverse time: the state next to the anchor comes first.
  const std::vector<double> rev_all{yv[2], yv[1], yv[0]};
  const std::vector<double> rev_tail{yv[2], yv[1]};
  const double exact_inverse = std::exp(oracle::log_likelihood(rev_tail, kLG, anchor) -
                                        oracle::log_likelihood(rev_all, kLG, anchor));
  const auto post = oracle::state_posterior(rev_all, kLG, anchor);
  std::vector<double> estimates;
  for (std::uint32_t rep = 0; rep < 5000; ++rep) {
    RngStream rng(27, {rep, 0, 0});
    Eigen::Vector3d z(rng.normal(), rng.normal(), rng.normal());
    const Eigen::VectorXd draw = post.mean + post.chol * z;
    const Trajectory path(1, 1, {draw(2), draw(1), draw(0), anchor, 0.9});
    const auto r = backward_block_move(model, kTheta, path, y, {K, 4, true}, rng);
    estimates.push_back(std::exp(-r.log_phat_old));
  }
  const auto ms = testing::mean_se(estimates);
  EXPECT_NEAR(ms.mean, exact_inverse, 3.0 * ms.se);
}

TEST(BackwardBlockMove, OutOfSupportGivesNegInfEstimate) {
  const testing::BoxNoiseModel model(0.1);
  const ObservationSeries y(1, {0.0, 0.0, 0.0, 0.0});
  const Trajectory path(1, 1, {5.0, 0.02, 0.01, -0.03});
  RngStream rng(28, {0, 0, 0});
  const auto r = backward_block_move(model, {}, path, y, {1, 1, true}, rng);
  EXPECT_EQ(r.log_phat_old, kNegInf);
  ASSERT_EQ(r.head.size(), 1u);
  EXPECT_EQ(r.head[0], 0.02);
}

TEST(SmootherWeightsBackward, SingleCandidate) {
  const LinearGaussianModel model;
  const std::vector<double> w{1.0}, cand{0.4}, prev{0.9}, yp{0.7};
  std::vector<double> out(1);
  smoother_weights_backward(model, kTheta, w, cand, prev, yp, out);
  EXPECT_EQ(out[0], 1.0);
}

TEST(SmootherWeightsBackward, ConstantBackwardPriorKeepsWeights) {
  const LinearGaussianModel model;
  const std::vector<double> w{0.2, 0.5, 0.3}, cand{0.4, 0.4, 0.4}, prev{0.9}, yp{0.7};
  std::vector<double> out(3);
  smoother_weights_backward(model, kTheta, w, cand, prev, yp, out);
  for (std::size_t m = 0; m < 3; ++m) EXPECT_NEAR(out[m], w[m], 1e-12);
}

TEST(SmootherWeightsBackward, ProductAndNormalize) {
  const LinearGaussianModel model;
  const std::vector<double> w{0.2, 0.5, 0.3}, cand{0.4, 1.1, 0.8}, prev{0.9}, yp{0.7};
  std::vector<double> out(3);
  smoother_weights_backward(model, kTheta, w, cand, prev, yp, out);
  std::vector<double> expected(3);
  double total = 0.0;
  for (std::size_t m = 0; m < 3; ++m) {
    expected[m] = w[m] * std::exp(oracle::normal_log_pdf(
                             prev[0], kLG.mu + kLG.phi * (cand[m] - kLG.mu), kLG.q()));
    total += expected[m];
  }
  for (std::size_t m = 0; m < 3; ++m) EXPECT_NEAR(out[m], expected[m] / total, 1e-12);
}

}  // namespace
}  // namespace prmcmc

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

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "prmcmc/errors.hpp"
#include "prmcmc/rng.hpp"
#include "prmcmc/weights.hpp"

namespace prmcmc {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

TEST(Philox, KnownAnswerVectors) {
  using Block = std::array<std::uint32_t, 4>;
  EXPECT_EQ(RngStream::philox({0, 0, 0, 0}, {0, 0}),
            (Block{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
  EXPECT_EQ(RngStream::philox({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                              {0xffffffffu, 0xffffffffu}),
            (Block{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
  EXPECT_EQ(RngStream::philox({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                              {0xa4093822u, 0x299f31d0u}),
            (Block{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(RngStream, SameIdSameSequence) {
  RngStream a(42, {3, 7, 2});
  RngStream b(42, {3, 7, 2});
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a(), b());
}

TEST(RngStream, DistinctIdsDiffer) {
  RngStream a(42, {3, 7, 2});
  RngStream b(42, {3, 7, 3});
  RngStream c(43, {3, 7, 2});
  const auto x = a();
  EXPECT_NE(x, b());
  EXPECT_NE(x, c());
}

TEST(RngStream, UniformMomentsAndRange) {
  RngStream rng(1, {0, 0, 0});
  const int n = 200000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, 3.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST(RngStream, GammaMean) {
  RngStream rng(2, {0, 0, 0});
  for (double shape : {0.3, 1.0, 4.5}) {
    const int n = 100000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += rng.gamma(shape);
    EXPECT_NEAR(sum / n, shape, 4.0 * std::sqrt(shape / n));
  }
}

TEST(Normalize, EqualWeights) {
  const std::vector<double> lw{0.0, 0.0};
  const auto w = normalize(lw);
  EXPECT_DOUBLE_EQ(w.probabilities[0], 0.5);
  EXPECT_DOUBLE_EQ(w.probabilities[1], 0.5);
  EXPECT_NEAR(w.log_sum, std::log(2.0), 1e-15);
}

TEST(Normalize, ExtremeConstantOffsets) {
  for (double c : {-1000.0, 0.0, 700.0}) {
    const std::vector<double> lw(4, c);
    const auto w = normalize(lw);
    for (double p : w.probabilities) EXPECT_DOUBLE_EQ(p, 0.25);
  }
}

TEST(Normalize, ThreeToOne) {
  const std::vector<double> lw{std::log(3.0), 0.0};
  const auto w = normalize(lw);
  EXPECT_NEAR(w.probabilities[0], 0.75, 1e-15);
  EXPECT_NEAR(w.probabilities[1], 0.25, 1e-15);
  EXPECT_NEAR(w.log_sum, std::log(4.0), 1e-15);
}

TEST(Normalize, AllZeroWeightsThrow) {
  const std::vector<double> lw{kNegInf, kNegInf, kNegInf};
  EXPECT_THROW(normalize(lw), AllWeightsZero);
}

TEST(Normalize, ShiftInvariance) {
  RngStream rng(3, {0, 0, 0});
  std::vector<double> lw(50);
  for (double& x : lw) x = 5.0 * rng.normal();
  std::vector<double> shifted = lw;
  for (double& x : shifted) x += 123.456;
  const auto a = normalize(lw);
  const auto b = normalize(shifted);
  for (std::size_t i = 0; i < lw.size(); ++i) {
    EXPECT_NEAR(a.probabilities[i], b.probabilities[i], 1e-12);
  }
  EXPECT_NEAR(b.log_sum - a.log_sum, 123.456, 1e-9);
}

TEST(Normalize, PartialZeros) {
  const std::vector<double> lw{kNegInf, 0.0, kNegInf};
  const auto w = normalize(lw);
  EXPECT_EQ(w.probabilities[0], 0.0);
  EXPECT_EQ(w.probabilities[1], 1.0);
}

TEST(Ess, Examples) {
  EXPECT_NEAR(ess(std::vector<double>(1000, 1e-3)), 1000.0, 1e-9);
  std::vector<double> point(10, 0.0);
  point[3] = 1.0;
  EXPECT_DOUBLE_EQ(ess(point), 1.0);
  EXPECT_NEAR(ess(std::vector<double>{0.5, 0.25, 0.25}), 8.0 / 3.0, 1e-12);
}

TEST(Ess, FromLogWeightsMatchesProbabilities) {
  const std::vector<double> lw{std::log(2.0), 0.0, 0.0};
  EXPECT_NEAR(ess_from_log_weights(lw), 8.0 / 3.0, 1e-12);
}

TEST(Categorical, SingleAtomConsumesNoRandomness) {
  RngStream a(5, {1, 2, 3});
  RngStream b(5, {1, 2, 3});
  EXPECT_EQ(sample_categorical(std::vector<double>{1.0}, a), 0u);
  EXPECT_EQ(a(), b());
}

TEST(Categorical, PointMassAlwaysSelected) {
  RngStream rng(6, {0, 0, 0});
  const std::vector<double> p{0.0, 1.0, 0.0};
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(sample_categorical(p, rng), 1u);
}

TEST(Categorical, Frequencies) {
  RngStream rng(7, {0, 0, 0});
  const std::vector<double> p{0.3, 0.7};
  const int n = 100000;
  int ones = 0;
  for (int i = 0; i < n; ++i) ones += static_cast<int>(sample_categorical(p, rng));
  EXPECT_NEAR(static_cast<double>(ones) / n, 0.7, 3.0 * std::sqrt(0.21 / n));
}

TEST(Categorical, TableNeverReturnsZeroProbabilityIndex) {
  RngStream rng(8, {0, 0, 0});
  const std::vector<double> p{0.0, 0.5, 0.0, 0.5, 0.0};
  const CategoricalTable table(p);
  for (int i = 0; i < 10000; ++i) {
    const auto k = table.draw(rng);
    EXPECT_TRUE(k == 1 || k == 3);
  }
}

TEST(Multinomial, UniformChiSquareGoodnessOfFit) {
  const std::size_t n = 50;
  const int reps = 1000;
  const std::vector<double> p(n, 1.0 / n);
  std::vector<double> counts(n, 0.0);
  for (int r = 0; r < reps; ++r) {
    RngStream rng(9, {kSystemStream, static_cast<std::uint32_t>(r), 0});
    for (auto a : multinomial_resample(p, n, rng)) counts[a] += 1.0;
  }
  const double expected = static_cast<double>(reps);
  double chi2 = 0.0;
  for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
  const boost::math::chi_squared dist(static_cast<double>(n - 1));
  EXPECT_GT(boost::math::cdf(boost::math::complement(dist, chi2)), 0.001);
}

TEST(Multinomial, PointMass) {
  RngStream rng(10, {0, 0, 0});
  std::vector<double> p(6, 0.0);
  p[3] = 1.0;
  for (auto a : multinomial_resample(p, 100, rng)) EXPECT_EQ(a, 3u);
}

TEST(Multinomial, TwoAtomCounts) {
  RngStream rng(11, {0, 0, 0});
  const std::vector<double> p{0.9, 0.1};
  const std::size_t n = 10000;
  double zeros = 0.0;
  for (auto a : multinomial_resample(p, n, rng)) zeros += (a == 0) ? 1.0 : 0.0;
  EXPECT_NEAR(zeros, 9000.0, 3.0 * std::sqrt(n * 0.9 * 0.1));
}

TEST(Resampling, PreservesWeightedExpectation) {
  const std::vector<double> p{0.1, 0.2, 0.3, 0.4};
  const std::vector<double> h{2.0, -1.0, 5.0, 0.5};
  double exact = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) exact += p[i] * h[i];
  for (int scheme = 0; scheme < 2; ++scheme) {
    const int reps = 20000;
    double sum = 0.0;
    double sum2 = 0.0;
    for (int r = 0; r < reps; ++r) {
      RngStream rng(12, {kSystemStream, static_cast<std::uint32_t>(r), 1});
      const auto a = scheme == 0 ? multinomial_resample(p, 10, rng) : systematic_resample(p, 10, rng);
      double m = 0.0;
      for (auto i : a) m += h[i] / 10.0;
      sum += m;
      sum2 += m * m;
    }
    const double mean = sum / reps;
    const double se = std::sqrt(std::max(0.0, sum2 / reps - mean * mean) / reps);
    EXPECT_NEAR(mean, exact, 3.0 * se + 1e-12) << "scheme " << scheme;
  }
}

TEST(Systematic, CountsWithinOneOfExpectation) {
  RngStream rng(13, {0, 0, 0});
  const std::vector<double> p{0.05, 0.15, 0.5, 0.3};
  const std::size_t n = 100;
  std::vector<double> counts(p.size(), 0.0);
  for (auto a : systematic_resample(p, n, rng)) counts[a] += 1.0;
  for (std::size_t i = 0; i < p.size(); ++i) EXPECT_LE(std::abs(counts[i] - n * p[i]), 1.0);
}

TEST(LogSumExp, EmptyAndNegInf) {
  EXPECT_EQ(log_sum_exp(std::vector<double>{}), kNegInf);
  EXPECT_EQ(log_sum_exp(std::vector<double>{kNegInf, kNegInf}), kNegInf);
  EXPECT_NEAR(log_sum_exp(std::vector<double>{1000.0, 1000.0}), 1000.0 + std::log(2.0), 1e-12);
}

}  // namespace
}  // namespace prmcmc

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

#include "prmcmc/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "prmcmc/errors.hpp"

namespace prmcmc {

double log_sum_exp(std::span<const double> x) {
  double max = -std::numeric_limits<double>::infinity();
  for (double v : x) max = std::max(max, v);
  if (!std::isfinite(max)) return max;
  double sum = 0.0;
  for (double v : x) sum += std::exp(v - max);
  return max + std::log(sum);
}

double normalize_into(std::span<const double> log_weights, std::span<double> out) {
  const double log_sum = log_sum_exp(log_weights);
  if (!(log_sum > -std::numeric_limits<double>::infinity())) {
    throw AllWeightsZero("normalize");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < log_weights.size(); ++i) {
    out[i] = std::exp(log_weights[i] - log_sum);
    total += out[i];
  }
  // Absorb the last few ulps of rounding so the vector sums to one.
  for (double& p : out) p /= total;
  return log_sum;
}

NormalizedWeights normalize(std::span<const double> log_weights) {
  NormalizedWeights result;
  result.probabilities.resize(log_weights.size());
  result.log_sum = normalize_into(log_weights, result.probabilities);
  return result;
}

double ess(std::span<const double> probabilities) {
  double sum_sq = 0.0;
  for (double p : probabilities) sum_sq += p * p;
  return 1.0 / sum_sq;
}

double ess_from_log_weights(std::span<const double> log_weights) {
  return ess(normalize(log_weights).probabilities);
}

std::size_t sample_categorical(std::span<const double> probabilities, RngStream& rng) {
  if (probabilities.size() == 1) return 0;
  double total = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    total += probabilities[i];
    if (probabilities[i] > 0.0) last_positive = i;
  }
  const double u = rng.uniform() * total;
  double cumulative = 0.0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    cumulative += probabilities[i];
    if (u < cumulative && probabilities[i] > 0.0) return i;
  }
  return last_positive;
}

void CategoricalTable::reset(std::span<const double> probabilities) {
  cumulative_.resize(probabilities.size());
  double running = 0.0;
  last_positive_ = 0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    running += probabilities[i];
    cumulative_[i] = running;
    if (probabilities[i] > 0.0) last_positive_ = i;
  }
}

std::size_t CategoricalTable::draw(RngStream& rng) const {
  if (cumulative_.size() == 1) return 0;
  const double u = rng.uniform() * cumulative_.back();
  // First index whose cumulative mass exceeds u; zero-mass atoms share the
  // cumulative value of their predecessor and are never selected.
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const auto index = static_cast<std::size_t>(it - cumulative_.begin());
  return std::min(index, last_positive_);
}

std::vector<std::size_t> multinomial_resample(std::span<const double> probabilities,
                                              std::size_t count, RngStream& rng) {
  const CategoricalTable table(probabilities);
  std::vector<std::size_t> ancestors(count);
  for (auto& a : ancestors) a = table.draw(rng);
  return ancestors;
}

std::vector<std::size_t> systematic_resample(std::span<const double> probabilities,
                                             std::size_t count, RngStream& rng) {
  std::vector<std::size_t> ancestors(count);
  if (count == 0) return ancestors;
  double total = 0.0;
  for (double p : probabilities) total += p;
  const double step = total / static_cast<double>(count);
  double point = rng.uniform() * step;
  double cumulative = probabilities[0];
  std::size_t index = 0;
  for (std::size_t n = 0; n < count; ++n) {
    while (point >= cumulative && index + 1 < probabilities.size()) {
      ++index;
      cumulative += probabilities[index];
    }
    ancestors[n] = index;
    point += step;
  }
  return ancestors;
}

}  // namespace prmcmc

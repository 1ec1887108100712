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

#include <cstddef>
#include <span>
#include <vector>

#include "prmcmc/rng.hpp"

namespace prmcmc {

// log(sum(exp(x))). Returns -inf when every entry is -inf (or x is empty).
double log_sum_exp(std::span<const double> x);

struct NormalizedWeights {
  std::vector<double> probabilities;
  double log_sum = 0.0;
};

// Normalizes log-domain weights. Throws AllWeightsZero when every entry is
// -inf.
NormalizedWeights normalize(std::span<const double> log_weights);

// Allocation-free variant: writes probabilities into `out` (same size as the
// input) and returns the log normalizing constant.
double normalize_into(std::span<const double> log_weights, std::span<double> out);

// Effective sample size 1 / sum(p^2) of a probability vector.
double ess(std::span<const double> probabilities);

// Convenience: ESS of unnormalized log-weights.
double ess_from_log_weights(std::span<const double> log_weights);

// One categorical draw. A single-atom vector returns 0 without consuming
// randomness.
std::size_t sample_categorical(std::span<const double> probabilities, RngStream& rng);

// Repeated draws from one categorical distribution via its cumulative table.
class CategoricalTable {
 public:
  CategoricalTable() = default;
  explicit CategoricalTable(std::span<const double> probabilities) { reset(probabilities); }

  void reset(std::span<const double> probabilities);
  std::size_t draw(RngStream& rng) const;
  std::size_t size() const { return cumulative_.size(); }

 private:
  std::vector<double> cumulative_;
  std::size_t last_positive_ = 0;
};

// `count` i.i.d. categorical draws (ancestor indices).
std::vector<std::size_t> multinomial_resample(std::span<const double> probabilities,
                                              std::size_t count, RngStream& rng);

// Systematic resampling: one uniform, `count` evenly spaced points.
std::vector<std::size_t> systematic_resample(std::span<const double> probabilities,
                                             std::size_t count, RngStream& rng);

}  // namespace prmcmc

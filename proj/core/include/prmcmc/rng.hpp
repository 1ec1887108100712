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

#include <array>
#include <cstdint>
#include <random>

namespace prmcmc {

// Identifies an independent random stream. Streams are keyed by the outer
// particle, the absolute time step and a substep tag, so the draws a particle
// sees never depend on how work is split across threads.
struct StreamId {
  std::uint32_t particle = 0;
  std::uint32_t step = 0;
  std::uint32_t substep = 0;
};

// Reserved particle slot for streams that belong to the whole system
// (outer resampling, data simulation).
inline constexpr std::uint32_t kSystemStream = 0xFFFFFFFFu;

// Counter-based generator (Philox4x32-10). The 64-bit seed is the key; the
// stream id and a block counter form the 128-bit counter.
//
// Satisfies UniformRandomBitGenerator so it can drive <random>
// distributions.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, StreamId id);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()();

  // Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }
  // Gamma with unit scale.
  double gamma(double shape);
  // Inverse gamma with density proportional to x^{-shape-1} exp(-scale/x).
  double inverse_gamma(double shape, double scale) { return scale / gamma(shape); }
  double beta(double a, double b);

  // Raw Philox4x32-10 block function, exposed for known-answer tests.
  static std::array<std::uint32_t, 4> philox(std::array<std::uint32_t, 4> counter,
                                             std::array<std::uint32_t, 2> key);

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_;
  std::array<std::uint32_t, 4> block_{};
  int used_ = 4;
  std::normal_distribution<double> normal_;
};

}  // namespace prmcmc

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

#include "prmcmc/state_space.hpp"

namespace prmcmc {

// Inner particle cloud of one conditional-SMC block move: M candidate states
// per block column, their log inner weights, normalized weights and the
// index of each candidate's parent in the neighbouring column. Column c holds
// time first_time + c. Candidate 0 is the pinned (current) path.
//
// Forward moves draw parents from column c-1; backward moves from column c+1.
class BlockWorkspace {
 public:
  void resize(std::size_t particles, std::size_t columns, std::size_t dim);

  std::size_t particles() const { return particles_; }
  std::size_t columns() const { return columns_; }
  std::size_t dim() const { return dim_; }

  MutVec state(std::size_t column, std::size_t m) {
    return MutVec(states_).subspan((column * particles_ + m) * dim_, dim_);
  }
  ConstVec state(std::size_t column, std::size_t m) const {
    return ConstVec(states_).subspan((column * particles_ + m) * dim_, dim_);
  }
  // All M candidate states of a column, flat.
  ConstVec column_states(std::size_t column) const {
    return ConstVec(states_).subspan(column * particles_ * dim_, particles_ * dim_);
  }
  std::span<double> log_v(std::size_t column) {
    return std::span<double>(log_v_).subspan(column * particles_, particles_);
  }
  std::span<const double> log_v(std::size_t column) const {
    return std::span<const double>(log_v_).subspan(column * particles_, particles_);
  }
  std::span<double> weights(std::size_t column) {
    return std::span<double>(weights_).subspan(column * particles_, particles_);
  }
  std::span<const double> weights(std::size_t column) const {
    return std::span<const double>(weights_).subspan(column * particles_, particles_);
  }
  std::size_t& parent(std::size_t column, std::size_t m) { return parents_[column * particles_ + m]; }
  std::size_t parent(std::size_t column, std::size_t m) const {
    return parents_[column * particles_ + m];
  }

  TimeIndex first_time = 0;
  // Selected candidate per column (k*).
  std::vector<std::size_t> lineage;
  std::vector<double> scratch;

 private:
  std::size_t particles_ = 0;
  std::size_t columns_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> states_;
  std::vector<double> log_v_;
  std::vector<double> weights_;
  std::vector<std::size_t> parents_;
};

struct BlockMoveOptions {
  std::size_t block = 2;       // K
  std::size_t candidates = 100;  // M
  bool use_smoother = true;
};

// Regenerated states alpha_{t-K..t} and log p-hat(y_t | ..., alpha_{t-K-1}).
// log_phat is -inf when every inner weight of some column vanished; the
// caller then gives the outer particle weight zero.
struct ForwardBlockResult {
  TimeIndex first_time = 0;
  std::vector<double> tail;
  double log_phat = 0.0;
};

// log v = log f(a_j | a_{j-1}, y_{j-1}) + log g(y_j | a_j) - log q(a_j | ...),
// with log mu(a_j) in place of f when ctx.prev is empty.
double inner_weight_forward(const StateSpaceModel& model, const ForwardContext& ctx,
                            ConstVec alpha, double log_q, Params theta);
double inner_weight_forward(const StateSpaceModel& model, const ForwardContext& ctx,
                            ConstVec alpha, Params theta);

// Conditional SMC over alpha_{t-K..t} with the current path alpha_{t-K..t-1}
// pinned as candidate 0; `path` must end at t-1 and start at or before t-K.
// When t-K is the first index of `path` the block has no predecessor and the
// initial density mu is used for its first state. K = 0 with an empty path
// starting at t is plain importance sampling of alpha_t from q_t.
ForwardBlockResult forward_block_move(const StateSpaceModel& model, Params theta,
                                      const Trajectory& path, const ObservationSeries& y,
                                      TimeIndex t, const BlockMoveOptions& options,
                                      RngStream& rng, BlockWorkspace& ws);
ForwardBlockResult forward_block_move(const StateSpaceModel& model, Params theta,
                                      const Trajectory& path, const ObservationSeries& y,
                                      TimeIndex t, const BlockMoveOptions& options,
                                      RngStream& rng);

// Smoothing weights Vbar_m proportional to V_m f(a_{j+1}^* | a_j^m, y_j).
// `candidates` holds the M states of column j flat. Throws AllWeightsZero.
void smoother_weights_forward(const StateSpaceModel& model, Params theta,
                              std::span<const double> weights, ConstVec candidates,
                              ConstVec selected_next, ConstVec y_j, std::span<double> out);

}  // namespace prmcmc

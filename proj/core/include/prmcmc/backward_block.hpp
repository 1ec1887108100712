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

#include <vector>

#include "prmcmc/forward_block.hpp"

namespace prmcmc {

// Regenerated head alpha_{s..s+K-1} (alpha_{s-1} is discarded) and
// log p-hat(y_{s-1} | y_{s:t}, alpha_{s+K}). log_phat_old is -inf when no
// candidate for alpha_{s-1} falls in the support of the target; the caller
// then gives the outer particle weight zero.
struct BackwardBlockResult {
  TimeIndex first_time = 0;
  std::vector<double> head;
  double log_phat_old = 0.0;
};

// log v = log p(a_j | a_{j+1}) + log g(y_j | a_j, a_{j+1}) - log q(a_j | a_{j+1}, y_j)
double inner_weight_backward(const StateSpaceModel& model, const BackwardContext& ctx,
                             ConstVec alpha, double log_q, Params theta);
double inner_weight_backward(const StateSpaceModel& model, const BackwardContext& ctx,
                             ConstVec alpha, Params theta);

// Conditional SMC in reverse time over alpha_{s-1..s+K-1} given alpha_{s+K},
// where s-1 = path.first(). Requires s+K <= path.last() and a model with a
// backward prior. K = 0 only estimates the increment and leaves the head
// empty.
BackwardBlockResult backward_block_move(const StateSpaceModel& model, Params theta,
                                        const Trajectory& path, const ObservationSeries& y,
                                        const BlockMoveOptions& options, RngStream& rng,
                                        BlockWorkspace& ws);
BackwardBlockResult backward_block_move(const StateSpaceModel& model, Params theta,
                                        const Trajectory& path, const ObservationSeries& y,
                                        const BlockMoveOptions& options, RngStream& rng);

// Smoothing weights Vbar_m proportional to
//   V_m p(a_{j-1}^* | a_j^m) g(y_{j-1} | a_{j-1}^*, a_j^m).
// The g factor is constant in m for models without leverage.
void smoother_weights_backward(const StateSpaceModel& model, Params theta,
                               std::span<const double> weights, ConstVec candidates,
                               ConstVec selected_prev, ConstVec y_prev, std::span<double> out);

}  // namespace prmcmc

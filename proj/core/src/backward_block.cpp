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

#include "prmcmc/backward_block.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "prmcmc/errors.hpp"
#include "prmcmc/weights.hpp"

namespace prmcmc {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool all_finite(ConstVec v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace

double inner_weight_backward(const StateSpaceModel& model, const BackwardContext& ctx,
                             ConstVec alpha, double log_q, Params theta) {
  const double log_prior = model.log_backward_prior(alpha, ctx.next, theta);
  const double log_g = model.log_obs(ctx.y, alpha, ctx.next, theta);
  if (log_prior == kNegInf || log_g == kNegInf) return kNegInf;
  return log_g + (log_prior - log_q);
}

double inner_weight_backward(const StateSpaceModel& model, const BackwardContext& ctx,
                             ConstVec alpha, Params theta) {
  return inner_weight_backward(model, ctx, alpha,
                               model.log_backward_proposal(ctx, theta, alpha), theta);
}

void smoother_weights_backward(const StateSpaceModel& model, Params theta,
                               std::span<const double> weights, ConstVec candidates,
                               ConstVec selected_prev, ConstVec y_prev, std::span<double> out) {
  const std::size_t M = weights.size();
  const std::size_t dim = candidates.size() / M;
  for (std::size_t m = 0; m < M; ++m) {
    if (weights[m] <= 0.0) {
      out[m] = kNegInf;
      continue;
    }
    const ConstVec alpha = candidates.subspan(m * dim, dim);
    const double log_p = model.log_backward_prior(selected_prev, alpha, theta);
    const double log_g = model.log_obs(y_prev, selected_prev, alpha, theta);
    out[m] = (log_p == kNegInf || log_g == kNegInf) ? kNegInf
                                                     : std::log(weights[m]) + log_p + log_g;
  }
  const double log_sum = log_sum_exp(out);
  if (log_sum == kNegInf) throw AllWeightsZero("backward smoother weights");
  for (std::size_t m = 0; m < M; ++m) out[m] = std::exp(out[m] - log_sum);
}

BackwardBlockResult backward_block_move(const StateSpaceModel& model, Params theta,
                                        const Trajectory& path, const ObservationSeries& y,
                                        const BlockMoveOptions& options, RngStream& rng,
                                        BlockWorkspace& ws) {
  const std::size_t K = options.block;
  const std::size_t M = options.candidates;
  const std::size_t dim = model.state_dim();
  if (M < 1) throw std::invalid_argument("backward block move needs M >= 1");
  const TimeIndex first = path.first();  // s - 1
  const TimeIndex anchor_time = first + static_cast<TimeIndex>(K) + 1;  // s + K
  if (anchor_time > path.last()) {
    throw std::invalid_argument("backward block move: block exceeds path");
  }

  const std::size_t columns = K + 1;
  ws.resize(M, columns, dim);
  ws.first_time = first;

  BackwardBlockResult result;
  result.first_time = first + 1;
  result.log_phat_old = kNegInf;

  for (std::size_t c = 0; c < columns; ++c) {
    const ConstVec current = path.at(first + static_cast<TimeIndex>(c));
    std::copy(current.begin(), current.end(), ws.state(c, 0).begin());
  }
  const ConstVec anchor = path.at(anchor_time);

  CategoricalTable table;
  BackwardContext ctx;
  bool aborted = false;
  for (std::size_t c = columns; c-- > 0 && !aborted;) {
    const TimeIndex j = first + static_cast<TimeIndex>(c);
    ctx.time = j;
    ctx.y = y.at(j);
    if (c == K) {
      ctx.next = anchor;
    } else {
      table.reset(ws.weights(c + 1));
    }
    auto log_v = ws.log_v(c);
    for (std::size_t m = 0; m < M; ++m) {
      if (c < K) {
        const std::size_t parent = m == 0 ? 0 : table.draw(rng);
        ws.parent(c, m) = parent;
        ctx.next = ws.state(c + 1, parent);
      }
      double log_q;
      if (m == 0) {
        log_q = model.log_backward_proposal(ctx, theta, ws.state(c, 0));
        if (!std::isfinite(log_q)) {
          throw DegenerateProposal("pinned state lies outside the backward proposal support");
        }
      } else {
        log_q = model.propose_backward(ctx, theta, rng, ws.state(c, m));
        if (!std::isfinite(log_q) || !all_finite(ws.state(c, m))) {
          throw DegenerateProposal("backward proposal produced a non-finite draw");
        }
      }
      log_v[m] = inner_weight_backward(model, ctx, ws.state(c, m), log_q, theta);
    }
    const double log_sum = log_sum_exp(log_v);
    if (c == 0) {
      if (log_sum != kNegInf) {
        normalize_into(log_v, ws.weights(0));
        result.log_phat_old = log_sum - std::log(static_cast<double>(M));
      }
    } else if (log_sum == kNegInf) {
      aborted = true;
    } else {
      normalize_into(log_v, ws.weights(c));
    }
  }

  result.head.resize(K * dim);
  if (K == 0) return result;
  if (aborted) {
    for (std::size_t c = 1; c < columns; ++c) {
      const ConstVec src = path.at(first + static_cast<TimeIndex>(c));
      std::copy(src.begin(), src.end(), result.head.begin() + static_cast<std::ptrdiff_t>((c - 1) * dim));
    }
    return result;
  }

  // Selection happens at time s (column 1), never at s-1.
  table.reset(ws.weights(1));
  ws.lineage[1] = table.draw(rng);
  for (std::size_t c = 2; c < columns; ++c) {
    if (options.use_smoother) {
      const auto prev = ws.state(c - 1, ws.lineage[c - 1]);
      smoother_weights_backward(model, theta, ws.weights(c), ws.column_states(c), prev,
                                y.at(first + static_cast<TimeIndex>(c) - 1), ws.scratch);
      table.reset(ws.scratch);
      ws.lineage[c] = table.draw(rng);
    } else {
      ws.lineage[c] = ws.parent(c - 1, ws.lineage[c - 1]);
    }
  }
  for (std::size_t c = 1; c < columns; ++c) {
    const ConstVec src = ws.state(c, ws.lineage[c]);
    std::copy(src.begin(), src.end(), result.head.begin() + static_cast<std::ptrdiff_t>((c - 1) * dim));
  }
  return result;
}

BackwardBlockResult backward_block_move(const StateSpaceModel& model, Params theta,
                                        const Trajectory& path, const ObservationSeries& y,
                                        const BlockMoveOptions& options, RngStream& rng) {
  BlockWorkspace ws;
  return backward_block_move(model, theta, path, y, options, rng, ws);
}

}  // namespace prmcmc

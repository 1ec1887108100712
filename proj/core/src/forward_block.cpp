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

#include "prmcmc/forward_block.hpp"

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

// Normalizes one column; returns its log-sum or -inf when every weight is 0.
double normalize_column(std::span<const double> log_v, std::span<double> out) {
  const double log_sum = log_sum_exp(log_v);
  if (log_sum == kNegInf) return kNegInf;
  normalize_into(log_v, out);
  return log_sum;
}

}  // namespace

void BlockWorkspace::resize(std::size_t particles, std::size_t columns, std::size_t dim) {
  particles_ = particles;
  columns_ = columns;
  dim_ = dim;
  states_.assign(particles * columns * dim, 0.0);
  log_v_.assign(particles * columns, kNegInf);
  weights_.assign(particles * columns, 0.0);
  parents_.assign(particles * columns, 0);
  lineage.assign(columns, 0);
  scratch.resize(particles);
}

double inner_weight_forward(const StateSpaceModel& model, const ForwardContext& ctx,
                            ConstVec alpha, double log_q, Params theta) {
  const double log_prior = ctx.prev.empty()
                               ? model.log_initial(alpha, theta)
                               : model.log_transition(alpha, ctx.prev, ctx.y_prev, theta);
  const double log_g = model.log_obs(ctx.y, alpha, ConstVec{}, theta);
  if (log_prior == kNegInf || log_g == kNegInf) return kNegInf;
  // Grouped so that q == prior cancels exactly.
  return log_g + (log_prior - log_q);
}

double inner_weight_forward(const StateSpaceModel& model, const ForwardContext& ctx,
                            ConstVec alpha, Params theta) {
  return inner_weight_forward(model, ctx, alpha, model.log_forward_proposal(ctx, theta, alpha),
                              theta);
}

void smoother_weights_forward(const StateSpaceModel& model, Params theta,
                              std::span<const double> weights, ConstVec candidates,
                              ConstVec selected_next, ConstVec y_j, std::span<double> out) {
  const std::size_t M = weights.size();
  const std::size_t dim = candidates.size() / M;
  for (std::size_t m = 0; m < M; ++m) {
    if (weights[m] <= 0.0) {
      out[m] = kNegInf;
      continue;
    }
    const double log_f =
        model.log_transition(selected_next, candidates.subspan(m * dim, dim), y_j, theta);
    out[m] = log_f == kNegInf ? kNegInf : std::log(weights[m]) + log_f;
  }
  const double log_sum = log_sum_exp(out);
  if (log_sum == kNegInf) throw AllWeightsZero("forward smoother weights");
  for (std::size_t m = 0; m < M; ++m) out[m] = std::exp(out[m] - log_sum);
}

ForwardBlockResult forward_block_move(const StateSpaceModel& model, Params theta,
                                      const Trajectory& path, const ObservationSeries& y,
                                      TimeIndex t, const BlockMoveOptions& options,
                                      RngStream& rng, BlockWorkspace& ws) {
  const std::size_t K = options.block;
  const std::size_t M = options.candidates;
  const std::size_t dim = model.state_dim();
  if (M < 1) throw std::invalid_argument("forward block move needs M >= 1");
  if (path.last() != t - 1) throw std::invalid_argument("forward block move: path must end at t-1");
  const TimeIndex first = t - static_cast<TimeIndex>(K);
  if (first < path.first()) throw std::invalid_argument("forward block move: block exceeds path");
  const bool has_predecessor = first > path.first();

  const std::size_t columns = K + 1;
  ws.resize(M, columns, dim);
  ws.first_time = first;

  ForwardBlockResult result;
  result.first_time = first;
  result.log_phat = kNegInf;

  // Candidate 0 carries the current path; its parents are all 0.
  for (std::size_t c = 0; c < K; ++c) {
    const ConstVec current = path.at(first + static_cast<TimeIndex>(c));
    std::copy(current.begin(), current.end(), ws.state(c, 0).begin());
  }

  CategoricalTable table;
  ForwardContext ctx;
  bool aborted = false;
  for (std::size_t c = 0; c < columns && !aborted; ++c) {
    const TimeIndex j = first + static_cast<TimeIndex>(c);
    ctx.time = j;
    ctx.y = y.at(j);
    if (c == 0) {
      ctx.prev = has_predecessor ? path.at(first - 1) : ConstVec{};
      ctx.y_prev = has_predecessor ? y.at(first - 1) : ConstVec{};
    } else {
      ctx.y_prev = y.at(j - 1);
      table.reset(ws.weights(c - 1));
    }
    auto log_v = ws.log_v(c);
    for (std::size_t m = 0; m < M; ++m) {
      if (c > 0) {
        const std::size_t parent = m == 0 ? 0 : table.draw(rng);
        ws.parent(c, m) = parent;
        ctx.prev = ws.state(c - 1, parent);
      }
      const bool pinned = m == 0 && c < K;
      double log_q;
      if (pinned) {
        log_q = model.log_forward_proposal(ctx, theta, ws.state(c, 0));
        if (!std::isfinite(log_q)) {
          throw DegenerateProposal("pinned state lies outside the forward proposal support");
        }
      } else {
        log_q = model.propose_forward(ctx, theta, rng, ws.state(c, m));
        if (!std::isfinite(log_q) || !all_finite(ws.state(c, m))) {
          throw DegenerateProposal("forward proposal produced a non-finite draw");
        }
      }
      log_v[m] = inner_weight_forward(model, ctx, ws.state(c, m), log_q, theta);
    }
    const double log_sum = normalize_column(log_v, ws.weights(c));
    if (log_sum == kNegInf) {
      aborted = true;
    } else if (c == K) {
      result.log_phat = log_sum - std::log(static_cast<double>(M));
    }
  }

  result.tail.resize(columns * dim);
  if (aborted) {
    // Zero-weight particle: keep the pinned states and repeat the last one.
    for (std::size_t c = 0; c < columns; ++c) {
      const TimeIndex j = std::min<TimeIndex>(first + static_cast<TimeIndex>(c), t - 1);
      if (!path.contains(j)) continue;
      const ConstVec src = path.at(j);
      std::copy(src.begin(), src.end(), result.tail.begin() + static_cast<std::ptrdiff_t>(c * dim));
    }
    return result;
  }

  table.reset(ws.weights(K));
  ws.lineage[K] = table.draw(rng);
  for (std::size_t c = K; c-- > 0;) {
    if (options.use_smoother) {
      const auto next = ws.state(c + 1, ws.lineage[c + 1]);
      smoother_weights_forward(model, theta, ws.weights(c), ws.column_states(c), next,
                               y.at(first + static_cast<TimeIndex>(c)), ws.scratch);
      table.reset(ws.scratch);
      ws.lineage[c] = table.draw(rng);
    } else {
      ws.lineage[c] = ws.parent(c + 1, ws.lineage[c + 1]);
    }
  }
  for (std::size_t c = 0; c < columns; ++c) {
    const ConstVec src = ws.state(c, ws.lineage[c]);
    std::copy(src.begin(), src.end(), result.tail.begin() + static_cast<std::ptrdiff_t>(c * dim));
  }
  return result;
}

ForwardBlockResult forward_block_move(const StateSpaceModel& model, Params theta,
                                      const Trajectory& path, const ObservationSeries& y,
                                      TimeIndex t, const BlockMoveOptions& options,
                                      RngStream& rng) {
  BlockWorkspace ws;
  return forward_block_move(model, theta, path, y, t, options, rng, ws);
}

}  // namespace prmcmc

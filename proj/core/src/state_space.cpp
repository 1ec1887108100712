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

#include "prmcmc/state_space.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "prmcmc/errors.hpp"

namespace prmcmc {

ObservationSeries::ObservationSeries(std::size_t dim, std::vector<double> values)
    : dim_(dim), values_(std::move(values)) {
  if (dim_ == 0 || values_.size() % dim_ != 0) {
    throw std::invalid_argument("observation buffer size is not a multiple of its dimension");
  }
}

ConstVec ObservationSeries::at(TimeIndex t) const {
  if (t < 1 || t > length()) throw std::out_of_range("observation index out of range");
  return ConstVec(values_).subspan(static_cast<std::size_t>(t - 1) * dim_, dim_);
}

ObservationSeries ObservationSeries::slice(TimeIndex first, TimeIndex last) const {
  if (first < 1 || last > length() || last < first - 1) {
    throw std::out_of_range("observation slice out of range");
  }
  const auto begin = values_.begin() + static_cast<std::ptrdiff_t>((first - 1) * dim_);
  const auto end = values_.begin() + static_cast<std::ptrdiff_t>(last * dim_);
  return ObservationSeries(dim_, std::vector<double>(begin, end));
}

Trajectory::Trajectory(TimeIndex first, std::size_t dim, std::vector<double> values)
    : first_(first), dim_(dim), values_(std::move(values)) {
  if (dim_ == 0 || values_.size() % dim_ != 0) {
    throw std::invalid_argument("trajectory buffer size is not a multiple of its dimension");
  }
}

ConstVec Trajectory::at(TimeIndex t) const {
  if (!contains(t)) throw std::out_of_range("trajectory index out of range");
  return ConstVec(values_).subspan(static_cast<std::size_t>(t - first_) * dim_, dim_);
}

MutVec Trajectory::at(TimeIndex t) {
  if (!contains(t)) throw std::out_of_range("trajectory index out of range");
  return MutVec(values_).subspan(static_cast<std::size_t>(t - first_) * dim_, dim_);
}

void Trajectory::push_back(ConstVec state) {
  if (state.size() != dim_) throw std::invalid_argument("state dimension mismatch");
  values_.insert(values_.end(), state.begin(), state.end());
}

void Trajectory::drop_front() {
  if (values_.empty()) throw std::out_of_range("drop_front on empty trajectory");
  values_.erase(values_.begin(), values_.begin() + static_cast<std::ptrdiff_t>(dim_));
  ++first_;
}

double StateSpaceModel::log_backward_prior(ConstVec, ConstVec, Params) const {
  throw UnsupportedOperation(name() + " has no backward prior");
}

double StateSpaceModel::propose_backward(const BackwardContext&, Params, RngStream&,
                                         MutVec) const {
  throw UnsupportedOperation(name() + " has no backward proposal");
}

double StateSpaceModel::log_backward_proposal(const BackwardContext&, Params, ConstVec) const {
  throw UnsupportedOperation(name() + " has no backward proposal");
}

double log_joint(const StateSpaceModel& model, Params theta, const Trajectory& path,
                 const ObservationSeries& y) {
  if (path.empty()) throw std::invalid_argument("log_joint on an empty trajectory");
  const TimeIndex s = path.first();
  const TimeIndex t = path.last();
  const ConstVec none;
  double total = model.log_prior(theta);
  if (total == -std::numeric_limits<double>::infinity()) return total;
  total = log_add_terms(total, model.log_initial(path.at(s), theta));
  total = log_add_terms(total, model.log_obs(y.at(s), path.at(s), none, theta));
  for (TimeIndex j = s + 1; j <= t; ++j) {
    total = log_add_terms(total, model.log_transition(path.at(j), path.at(j - 1), y.at(j - 1), theta));
    total = log_add_terms(total, model.log_obs(y.at(j), path.at(j), none, theta));
  }
  return total;
}

double backward_factorized_log_joint(const StateSpaceModel& model, Params theta,
                                     const Trajectory& path, const ObservationSeries& y) {
  if (path.empty()) throw std::invalid_argument("log_joint on an empty trajectory");
  const TimeIndex s = path.first();
  const TimeIndex t = path.last();
  const ConstVec none;
  double total = model.log_prior(theta);
  if (total == -std::numeric_limits<double>::infinity()) return total;
  for (TimeIndex j = s + 1; j <= t; ++j) {
    total = log_add_terms(total, model.log_backward_prior(path.at(j - 1), path.at(j), theta));
    total = log_add_terms(total, model.log_obs(y.at(j - 1), path.at(j - 1), path.at(j), theta));
  }
  total = log_add_terms(total, model.log_initial(path.at(t), theta));
  total = log_add_terms(total, model.log_obs(y.at(t), path.at(t), none, theta));
  return total;
}

}  // namespace prmcmc

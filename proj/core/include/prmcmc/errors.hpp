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

#include <stdexcept>
#include <string>

namespace prmcmc {

// Every weight in a normalization was zero (all log-weights are -inf).
class AllWeightsZero : public std::runtime_error {
 public:
  explicit AllWeightsZero(const std::string& where)
      : std::runtime_error("all weights are zero in " + where) {}
};

// A proposal produced a non-finite state or expansion point.
class DegenerateProposal : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnsupportedOperation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace prmcmc

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


#include <benchmark/benchmark.h>

#include <optional>
#include <vector>

#include "prmcmc/backward_block.hpp"
#include "prmcmc/engine.hpp"
#include "prmcmc/forward_block.hpp"
#include "prmcmc/linear_gaussian.hpp"
#include "prmcmc/rsv.hpp"
#include "prmcmc/weights.hpp"

namespace prmcmc {
namespace {

const std::vector<double> kLgTheta{1.0, 0.05};
const std::vector<double> kRsvTheta{0.0, 0.97, 0.0225, -0.3, 0.05, -0.4};

SimulatedData simulated(const StateSpaceModel& model, Params theta, TimeIndex length) {
  RngStream rng(1, {kSystemStream, 0, 0});
  return model.simulate(theta, length, rng);
}

void BM_ForwardBlockLg(benchmark::State& state) {
  const LinearGaussianModel model(LGProposal::prior);
  const auto data = simulated(model, kLgTheta, 64);
  Trajectory path = data.states;
  path.values().pop_back();
  const BlockMoveOptions opts{static_cast<std::size_t>(state.range(0)),
                              static_cast<std::size_t>(state.range(1)), true};
  BlockWorkspace ws;
  std::uint32_t i = 0;
  for (auto _ : state) {
    RngStream rng(2, {i++, 0, 0});
    benchmark::DoNotOptimize(forward_block_move(model, kLgTheta, path, data.observations, 64, opts, rng, ws));
  }
}
BENCHMARK(BM_ForwardBlockLg)->Args({2, 100})->Args({2, 300})->Args({10, 300});

void BM_BackwardBlockLg(benchmark::State& state) {
  const LinearGaussianModel model(LGProposal::prior);
  const auto data = simulated(model, kLgTheta, 64);
  const BlockMoveOptions opts{static_cast<std::size_t>(state.range(0)),
                              static_cast<std::size_t>(state.range(1)), true};
  BlockWorkspace ws;
  std::uint32_t i = 0;
  for (auto _ : state) {
    RngStream rng(3, {i++, 0, 0});
    benchmark::DoNotOptimize(backward_block_move(model, kLgTheta, data.states, data.observations, opts, rng, ws));
  }
}
BENCHMARK(BM_BackwardBlockLg)->Args({2, 100})->Args({2, 300})->Args({10, 300});

void BM_ForwardBlockRsv(benchmark::State& state) {
  const RsvModel model;
  const auto data = simulated(model, kRsvTheta, 64);
  Trajectory path = data.states;
  path.values().pop_back();
  const BlockMoveOptions opts{10, 300, true};
  BlockWorkspace ws;
  std::uint32_t i = 0;
  for (auto _ : state) {
    RngStream rng(4, {i++, 0, 0});
    benchmark::DoNotOptimize(forward_block_move(model, kRsvTheta, path, data.observations, 64, opts, rng, ws));
  }
}
BENCHMARK(BM_ForwardBlockRsv);

void BM_RsvKernelSweep(benchmark::State& state) {
  const RsvModel model;
  const auto data = simulated(model, kRsvTheta, state.range(0));
  std::vector<double> theta = kRsvTheta;
  Trajectory path = data.states;
  RngStream rng(5, {0, 0, 0});
  for (auto _ : state) model.mcmc_kernel(theta, path, data.observations, true, rng);
}
BENCHMARK(BM_RsvKernelSweep)->Arg(250)->Arg(500);

void BM_MultinomialResample(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  RngStream rng(6, {0, 0, 0});
  std::vector<double> logw(n);
  for (double& w : logw) w = rng.normal();
  const auto p = normalize(logw).probabilities;
  for (auto _ : state) benchmark::DoNotOptimize(multinomial_resample(p, n, rng));
}
BENCHMARK(BM_MultinomialResample)->Arg(1000)->Arg(100000);

void BM_LgRoll(benchmark::State& state) {
  const LinearGaussianModel model;
  const auto data = simulated(model, kLgTheta, 400);
  EngineConfig c;
  c.particles = 500;
  c.candidates = 100;
  c.block = 2;
  c.mcmc_sweeps = 1;
  c.scheme = state.range(0) ? Scheme::block : Scheme::simple;
  std::optional<RollingEngine> engine;
  for (auto _ : state) {
    if (!engine || engine->system().t == data.observations.length()) {
      state.PauseTiming();
      engine.emplace(model, data.observations, c);
      engine->initialize_sequential(100);
      state.ResumeTiming();
    }
    benchmark::DoNotOptimize(engine->roll());
  }
}
BENCHMARK(BM_LgRoll)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace prmcmc

BENCHMARK_MAIN();

// Copyright 2026 The embope Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include <vector>

#include "embope/estimators.h"
#include "embope/multinomial.h"
#include "embope/reward_model.h"
#include "embope/rng.h"
#include "embope/sampling.h"
#include "embope/synth.h"

namespace embope {
namespace {

SynthEnvironment MakeEnv(int n_actions) {
  SynthConfig config;
  config.n_actions = n_actions;
  config.seed = 1;
  return build_env(config);
}

void BM_FitMultinomial(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int classes = static_cast<int>(state.range(1));
  RngStream rng(2);
  const Matrix x = SampleStandardNormal(rng, n, 10);
  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) labels[i] = static_cast<int>(rng.NextUniform() * classes);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_multinomial(x, labels, classes));
  }
}
BENCHMARK(BM_FitMultinomial)->Args({2000, 10})->Args({2000, 100})
    ->Unit(benchmark::kMillisecond);

void BM_MarginalRewards(benchmark::State& state) {
  const SynthEnvironment env = MakeEnv(static_cast<int>(state.range(0)));
  RngStream rng(3);
  const Matrix x = sample_contexts(10000, env.context_dim(), rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(marginal_expected_rewards(env, x));
  }
}
BENCHMARK(BM_MarginalRewards)->Arg(100)->Arg(1000)
    ->Unit(benchmark::kMillisecond);

void BM_RewardModelEpoch(benchmark::State& state) {
  const SynthEnvironment env = MakeEnv(100);
  RngStream rng(4);
  const LoggedDataset data = sample_logged_data(env, 20000, rng);
  TrainConfig config;
  config.epochs = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        train_reward_model(data, InputRepr::kOneHot, config));
  }
}
BENCHMARK(BM_RewardModelEpoch)->Unit(benchmark::kMillisecond);

void BM_IpsAndMips(benchmark::State& state) {
  const SynthEnvironment env = MakeEnv(static_cast<int>(state.range(0)));
  RngStream rng(5);
  const LoggedDataset data = sample_logged_data(env, 20000, rng);
  const PolicyMatrix pi = target_policy(env, data.contexts());
  for (auto _ : state) {
    benchmark::DoNotOptimize(ips(data, pi));
    benchmark::DoNotOptimize(mips(data, pi));
  }
}
BENCHMARK(BM_IpsAndMips)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace embope

BENCHMARK_MAIN();

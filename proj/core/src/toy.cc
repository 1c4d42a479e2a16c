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

#include "embope/toy.h"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "embope/errors.h"
#include "embope/sampling.h"

namespace embope {
namespace {

double Sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

void ToyConfig::Validate() const {
  if (context_dim < 1) throw ParameterError("context_dim must be >= 1");
  if (n_actions < 1) throw ParameterError("n_actions must be >= 1");
  if (!(noise_sd >= 0.0) || !std::isfinite(noise_sd)) {
    throw ParameterError("noise_sd must be non-negative");
  }
}

Vector ToyEnvironment::logging_probs() const { return nu / nu.sum(); }

ToyEnvironment build_toy(const ToyConfig& config) {
  config.Validate();
  const SeededRng seeds(config.seed);
  ToyEnvironment env;
  {
    RngStream rng = seeds.Stream("theta");
    env.theta = SampleStandardNormal(rng, config.n_actions, config.context_dim);
  }
  {
    RngStream rng = seeds.Stream("mu");
    env.mu = SampleStandardNormal(rng, config.n_actions, 1);
  }
  {
    RngStream rng = seeds.Stream("nu");
    env.nu = SampleExponential(rng, 1.0, config.n_actions, 1);
    for (auto& v : env.nu) {
      // Exp(1) is continuous; an exact zero can only come from the engine's
      // endpoint and would make an action unloggable.
      if (v <= 0.0) v = std::numeric_limits<double>::min();
    }
  }
  env.noise_sd = config.noise_sd;
  return env;
}

double toy_reward_mean(const ToyEnvironment& env, const Vector& context,
                       int action) {
  if (action < 0 || action >= env.n_actions()) {
    throw ParameterError("action " + std::to_string(action) + " out of range");
  }
  if (context.size() != env.context_dim()) {
    throw ParameterError("context dimension mismatch");
  }
  return Sigmoid(env.theta.row(action).dot(context) + env.mu[action]);
}

LoggedDataset sample_toy_logged_data(const ToyEnvironment& env, int n,
                                     RngStream& rng) {
  if (n < 1) throw ParameterError("n must be >= 1");
  const Vector probs = env.logging_probs();
  Matrix contexts = SampleStandardNormal(rng, n, env.context_dim());
  std::vector<int> actions(static_cast<size_t>(n));
  Vector rewards(n);
  Vector propensities(n);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int t = 0; t < n; ++t) {
    const int a = SampleCategoricalUnchecked(rng, probs.data(), env.n_actions());
    actions[t] = a;
    propensities[t] = probs[a];
    rewards[t] = Sigmoid(env.theta.row(a).dot(contexts.row(t)) + env.mu[a]) +
                 env.noise_sd * normal(rng.engine());
  }
  return LoggedDataset(std::move(contexts), std::move(actions),
                       std::move(rewards), std::move(propensities),
                       env.n_actions(), std::nullopt, std::nullopt,
                       broadcast_policy(probs, n));
}

double gaussian_sigmoid_mean(double mean, double sd) {
  if (!std::isfinite(mean) || !(sd >= 0.0) || !std::isfinite(sd)) {
    throw ParameterError("gaussian_sigmoid_mean needs finite mean and sd >= 0");
  }
  constexpr double kHalfWidth = 12.0;
  constexpr int kSteps = 2400;
  constexpr double kStep = 2.0 * kHalfWidth / kSteps;
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  double sum = 0.0;
  for (int i = 0; i <= kSteps; ++i) {
    const double z = -kHalfWidth + i * kStep;
    const double w = (i == 0 || i == kSteps) ? 0.5 : 1.0;
    sum += w * norm * std::exp(-0.5 * z * z) * Sigmoid(mean + sd * z);
  }
  return sum * kStep;
}

Vector toy_action_values(const ToyEnvironment& env) {
  Vector values(env.n_actions());
  for (int a = 0; a < env.n_actions(); ++a) {
    values[a] = gaussian_sigmoid_mean(env.mu[a], env.theta.row(a).norm());
  }
  return values;
}

double toy_true_value(const ToyEnvironment& env, const Vector& target_probs) {
  if (target_probs.size() != env.n_actions()) {
    throw ParameterError("target distribution must cover every action");
  }
  if (target_probs.minCoeff() < 0.0 ||
      std::abs(target_probs.sum() - 1.0) > 1e-9) {
    throw ParameterError("target distribution must be a probability vector");
  }
  return target_probs.dot(toy_action_values(env));
}

}  // namespace embope

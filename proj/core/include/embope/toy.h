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

#ifndef EMBOPE_TOY_H_
#define EMBOPE_TOY_H_

// Non-contextual-logging toy problem with per-action logistic rewards:
//   x ~ N(0, I), a ~ pi_0(a) = nu_a / sum nu, r = f_a(x) + noise,
//   f_a(x) = sigmoid(x . theta_a + mu_a).

#include <cstdint>

#include "embope/bandit.h"
#include "embope/rng.h"
#include "embope/types.h"

namespace embope {

struct ToyConfig {
  int context_dim = 5;
  int n_actions = 50;
  double noise_sd = 0.1;
  std::uint64_t seed = 0;

  void Validate() const;
};

struct ToyEnvironment {
  Matrix theta;  // |A| x d_X, N(0, 1)
  Vector mu;     // |A|, N(0, 1)
  Vector nu;     // |A|, Exp(1), strictly positive
  double noise_sd = 0.1;

  int n_actions() const { return static_cast<int>(theta.rows()); }
  int context_dim() const { return static_cast<int>(theta.cols()); }
  // nu / sum(nu).
  Vector logging_probs() const;
};

ToyEnvironment build_toy(const ToyConfig& config);

// f_a(x).
double toy_reward_mean(const ToyEnvironment& env, const Vector& context,
                       int action);

// The dataset carries the context-free logging policy on every row and no
// embeddings.
LoggedDataset sample_toy_logged_data(const ToyEnvironment& env, int n,
                                     RngStream& rng);

// E_x f_a(x) for every action. With z = x . theta_a + mu_a ~ N(mu_a,
// ||theta_a||^2) this is a one-dimensional Gaussian integral, evaluated by a
// trapezoidal rule on [-12, 12] standard deviations (exponentially convergent
// for this analytic integrand).
Vector toy_action_values(const ToyEnvironment& env);

// E[sigmoid(z)] for z ~ N(mean, sd^2), by the same trapezoidal rule.
double gaussian_sigmoid_mean(double mean, double sd);

// sum_a pi(a) E_x f_a(x) for a context-free target distribution.
double toy_true_value(const ToyEnvironment& env, const Vector& target_probs);

}  // namespace embope

#endif  // EMBOPE_TOY_H_

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
#include <functional>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "embope/errors.h"
#include "embope/sampling.h"

namespace embope {
namespace {

// E[sigmoid(mean + sd Z)], Z ~ N(0, 1), by adaptive Simpson quadrature on
// [-40, 40].
double SigmoidNormalDensity(double mean, double sd, double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi) /
         (1.0 + std::exp(-(mean + sd * z)));
}

double AdaptiveSimpson(const std::function<double(double)>& f, double a,
                       double b, double fa, double fm, double fb, double whole,
                       double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return AdaptiveSimpson(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         AdaptiveSimpson(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

double QuadratureSigmoid(double mean, double sd) {
  const auto f = [&](double z) { return SigmoidNormalDensity(mean, sd, z); };
  const double a = -40.0, b = 40.0, m = 0.0;
  const double fa = f(a), fm = f(m), fb = f(b);
  return AdaptiveSimpson(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4 * fm + fb),
                         1e-13, 40);
}

TEST(ToyTest, GaussianSigmoidMeanMatchesAdaptiveQuadrature) {
  for (double mean : {-2.0, -0.3, 0.0, 0.7, 3.0}) {
    for (double sd : {0.0, 0.5, 1.0, 2.2, 4.0}) {
      EXPECT_NEAR(gaussian_sigmoid_mean(mean, sd),
                  QuadratureSigmoid(mean, sd), 1e-9)
          << mean << " " << sd;
    }
  }
  EXPECT_NEAR(gaussian_sigmoid_mean(0.0, 3.0), 0.5, 1e-15);
  EXPECT_NEAR(gaussian_sigmoid_mean(1.0, 0.0), 1.0 / (1.0 + std::exp(-1.0)),
              1e-14);
}

TEST(ToyTest, GaussianSigmoidMeanMatchesMonteCarlo) {
  RngStream rng(1);
  const Matrix z = SampleStandardNormal(rng, 400000, 1);
  const double mean = 0.4, sd = 1.7;
  const Eigen::ArrayXd s = 1.0 / (1.0 + (-(mean + sd * z.array())).exp());
  const double mc = s.mean();
  const double se = std::sqrt((s - mc).square().mean() / z.rows());
  EXPECT_NEAR(gaussian_sigmoid_mean(mean, sd), mc, 5 * se);
}

TEST(ToyTest, ActionValuesMatchContextMonteCarlo) {
  ToyConfig config;
  config.n_actions = 4;
  config.seed = 3;
  const ToyEnvironment env = build_toy(config);
  const Vector values = toy_action_values(env);
  RngStream rng(2);
  const Matrix x = SampleStandardNormal(rng, 200000, env.context_dim());
  for (int a = 0; a < 4; ++a) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      sum += toy_reward_mean(env, x.row(i).transpose(), a);
    }
    EXPECT_NEAR(values[a], sum / x.rows(), 0.005) << "action " << a;
  }
}

TEST(ToyTest, TrueValueIsTargetWeightedActionValue) {
  ToyConfig config;
  config.n_actions = 6;
  const ToyEnvironment env = build_toy(config);
  Vector target = Vector::Zero(6);
  target[2] = 1.0;
  EXPECT_DOUBLE_EQ(toy_true_value(env, target), toy_action_values(env)[2]);
  EXPECT_THROW(toy_true_value(env, Vector::Constant(6, 0.5)), ParameterError);
  EXPECT_THROW(toy_true_value(env, Vector::Constant(5, 0.2)), ParameterError);
}

TEST(ToyTest, LoggedDataUsesContextFreeLogging) {
  ToyConfig config;
  config.n_actions = 8;
  config.seed = 4;
  const ToyEnvironment env = build_toy(config);
  EXPECT_GT(env.nu.minCoeff(), 0.0);
  const Vector probs = env.logging_probs();
  EXPECT_NEAR(probs.sum(), 1.0, 1e-15);
  RngStream rng(5);
  const int n = 100000;
  const LoggedDataset data = sample_toy_logged_data(env, n, rng);
  EXPECT_FALSE(data.has_embeddings());
  Vector freq = Vector::Zero(8);
  for (int t = 0; t < n; ++t) {
    const int a = data.actions()[t];
    freq[a] += 1.0 / n;
    EXPECT_EQ(data.logging_propensities()[t], probs[a]);
  }
  for (int a = 0; a < 8; ++a) {
    EXPECT_NEAR(freq[a], probs[a],
                5 * std::sqrt(probs[a] * (1 - probs[a]) / n));
  }
  EXPECT_EQ(data.logging_policy().probs().row(17).transpose(), probs);
}

TEST(ToyTest, NoiselessRewardsEqualTheMean) {
  ToyConfig config;
  config.noise_sd = 0.0;
  config.n_actions = 3;
  const ToyEnvironment env = build_toy(config);
  RngStream rng(6);
  const LoggedDataset data = sample_toy_logged_data(env, 50, rng);
  for (int t = 0; t < 50; ++t) {
    EXPECT_DOUBLE_EQ(data.rewards()[t],
                     toy_reward_mean(env, data.contexts().row(t).transpose(),
                                     data.actions()[t]));
  }
}

TEST(ToyTest, RejectsBadInput) {
  ToyConfig config;
  config.noise_sd = -0.1;
  EXPECT_THROW(build_toy(config), ParameterError);
  EXPECT_THROW(gaussian_sigmoid_mean(0.0, -1.0), ParameterError);
  EXPECT_THROW(gaussian_sigmoid_mean(NAN, 1.0), ParameterError);
  const ToyEnvironment env = build_toy(ToyConfig{});
  EXPECT_THROW(toy_reward_mean(env, Vector::Zero(5), 50), ParameterError);
  EXPECT_THROW(toy_reward_mean(env, Vector::Zero(4), 0), ParameterError);
}

}  // namespace
}  // namespace embope

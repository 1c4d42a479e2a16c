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

#include "embope/synth.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "embope/errors.h"
#include "embope/sampling.h"

namespace embope {
namespace {

Matrix RowSoftmax(const Matrix& logits) {
  Matrix out = logits;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    auto row = out.row(i);
    row = (row.array() - row.maxCoeff()).exp();
    row /= row.sum();
  }
  return out;
}

void RequireShape(const Matrix& m, Eigen::Index rows, Eigen::Index cols,
                  const std::string& what) {
  if (m.rows() != rows || m.cols() != cols) {
    throw ParameterError(what + " must be " + std::to_string(rows) + " x " +
                         std::to_string(cols));
  }
  if (!m.allFinite()) throw ParameterError(what + " is not finite");
}

void RequireSize(const Vector& v, Eigen::Index size, const std::string& what) {
  if (v.size() != size) {
    throw ParameterError(what + " must have length " + std::to_string(size));
  }
  if (!v.allFinite()) throw ParameterError(what + " is not finite");
}

double JointSpaceSize(const SynthConfig& c) {
  return std::pow(static_cast<double>(c.cardinality), c.embedding_dims);
}

bool Enumerable(const SynthConfig& c) {
  return JointSpaceSize(c) <= c.enumeration_budget;
}

// Hidden pre-activation of the first layer for the context part only.
Matrix NeuralContextPart(const NeuralRewardParams& nn, const Matrix& contexts) {
  const auto dx = contexts.cols();
  Matrix h = contexts * nn.w1.topRows(dx);
  h.rowwise() += nn.b1.transpose();
  return h;
}

// Network output for every context given the shared context part and one
// code vector.
Vector NeuralOutputs(const NeuralRewardParams& nn, const Matrix& context_part,
                     int context_dim, int cardinality, const int* codes,
                     int dims, Eigen::Index code_stride) {
  Eigen::RowVectorXd offset = Eigen::RowVectorXd::Zero(nn.w1.cols());
  for (int k = 0; k < dims; ++k) {
    offset += nn.w1.row(context_dim + k * cardinality + codes[k * code_stride]);
  }
  Matrix h1 = context_part;
  h1.rowwise() += offset;
  h1 = h1.array().tanh();
  Matrix h2 = h1 * nn.w2;
  h2.rowwise() += nn.b2.transpose();
  h2 = h2.array().tanh();
  return (h2 * nn.w3).array() + nn.b3;
}

Matrix NeuralMarginal(const SynthEnvironment& env, const Matrix& contexts) {
  const SynthConfig& c = env.config();
  const NeuralRewardParams& nn = *env.params().neural;
  const Matrix context_part = NeuralContextPart(nn, contexts);
  Matrix q = Matrix::Zero(contexts.rows(), c.n_actions);
  if (Enumerable(c)) {
    std::vector<int> codes(static_cast<size_t>(c.embedding_dims), 0);
    Vector joint(c.n_actions);
    while (true) {
      const Vector f = NeuralOutputs(nn, context_part, c.context_dim,
                                     c.cardinality, codes.data(),
                                     c.embedding_dims, 1);
      for (int a = 0; a < c.n_actions; ++a) {
        const Matrix& p = env.embedding_probs(a);
        double prob = 1.0;
        for (int k = 0; k < c.embedding_dims; ++k) prob *= p(k, codes[k]);
        joint[a] = prob;
      }
      q.noalias() += f * joint.transpose();
      int k = c.embedding_dims - 1;
      while (k >= 0 && ++codes[k] == c.cardinality) codes[k--] = 0;
      if (k < 0) break;
    }
  } else {
    for (int a = 0; a < c.n_actions; ++a) {
      const CodeMatrix& draws = env.monte_carlo_embeddings()[a];
      for (Eigen::Index j = 0; j < draws.rows(); ++j) {
        q.col(a) += NeuralOutputs(nn, context_part, c.context_dim,
                                  c.cardinality, &draws(j, 0),
                                  c.embedding_dims, draws.rows());
      }
      q.col(a) /= static_cast<double>(draws.rows());
    }
  }
  return q;
}

}  // namespace

void SynthConfig::Validate() const {
  if (context_dim < 1) throw ParameterError("context_dim must be >= 1");
  if (n_actions < 2) throw ParameterError("n_actions must be >= 2");
  if (embedding_dims < 1) throw ParameterError("embedding_dims must be >= 1");
  if (cardinality < 1) throw ParameterError("cardinality must be >= 1");
  if (hidden_dims < 0 || hidden_dims >= embedding_dims) {
    throw ParameterError("hidden_dims must lie in [0, embedding_dims)");
  }
  if (!(reward_noise_sd >= 0.0) || !std::isfinite(reward_noise_sd)) {
    throw ParameterError("reward_noise_sd must be non-negative");
  }
  if (!std::isfinite(beta)) throw ParameterError("beta must be finite");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw ParameterError("epsilon must lie in [0, 1]");
  }
  if (reward_kind == RewardKind::kNeural) {
    if (neural_width < 1) throw ParameterError("neural_width must be >= 1");
    if (monte_carlo_draws < 1) {
      throw ParameterError("monte_carlo_draws must be >= 1");
    }
  }
}

SynthEnvironment::SynthEnvironment(SynthConfig config, SynthParameters params)
    : config_(std::move(config)), params_(std::move(params)) {
  config_.Validate();
  const int na = config_.n_actions;
  const int de = config_.embedding_dims;
  const int card = config_.cardinality;
  const int dx = config_.context_dim;

  if (static_cast<int>(params_.alpha.size()) != na) {
    throw ParameterError("alpha needs one matrix per action");
  }
  for (const Matrix& alpha : params_.alpha) RequireShape(alpha, de, card, "alpha");
  RequireShape(params_.m, dx, dx, "M");
  RequireSize(params_.theta_x, dx, "theta_x");
  RequireSize(params_.theta_e, dx, "theta_e");
  if (static_cast<int>(params_.category_vectors.size()) != de) {
    throw ParameterError("category_vectors needs one matrix per dimension");
  }
  for (const Matrix& xk : params_.category_vectors) {
    RequireShape(xk, card, dx, "category_vectors");
  }
  RequireSize(params_.eta, de, "eta");
  if (params_.eta.minCoeff() < 0.0 ||
      std::abs(params_.eta.sum() - 1.0) > 1e-9) {
    throw ParameterError("eta must lie on the simplex");
  }

  embedding_probs_.reserve(na);
  for (const Matrix& alpha : params_.alpha) {
    embedding_probs_.push_back(RowSoftmax(alpha));
  }

  if (config_.reward_kind == RewardKind::kLinear) {
    if (params_.neural.has_value()) {
      throw ParameterError("neural parameters given for a linear reward");
    }
    term_direction_.reserve(de);
    term_offset_.reserve(de);
    for (int k = 0; k < de; ++k) {
      const Matrix& xk = params_.category_vectors[k];
      Matrix dir = xk * params_.m.transpose();
      dir.rowwise() += params_.theta_x.transpose();
      term_direction_.push_back(std::move(dir));
      term_offset_.push_back(xk * params_.theta_e);
    }
    marginal_weights_ = Matrix::Zero(na, dx);
    marginal_bias_ = Vector::Zero(na);
    for (int a = 0; a < na; ++a) {
      const Matrix& p = embedding_probs_[a];
      for (int k = 0; k < de; ++k) {
        const double eta = params_.eta[k];
        marginal_weights_.row(a) += eta * (p.row(k) * term_direction_[k]);
        marginal_bias_[a] += eta * p.row(k).dot(term_offset_[k]);
      }
    }
  } else {
    if (!params_.neural.has_value()) {
      throw ParameterError("neural reward requires network parameters");
    }
    const NeuralRewardParams& nn = *params_.neural;
    const int width = config_.neural_width;
    RequireShape(nn.w1, dx + de * card, width, "w1");
    RequireSize(nn.b1, width, "b1");
    RequireShape(nn.w2, width, width, "w2");
    RequireSize(nn.b2, width, "b2");
    RequireSize(nn.w3, width, "w3");
    if (!std::isfinite(nn.b3)) throw ParameterError("b3 is not finite");
    if (!Enumerable(config_)) {
      const SeededRng seeds(config_.seed);
      mc_embeddings_.reserve(na);
      for (int a = 0; a < na; ++a) {
        RngStream rng = seeds.Stream("neural_monte_carlo", a);
        const Matrix& p = embedding_probs_[a];
        CodeMatrix draws(config_.monte_carlo_draws, de);
        for (int j = 0; j < config_.monte_carlo_draws; ++j) {
          for (int k = 0; k < de; ++k) {
            draws(j, k) =
                SampleCategoricalUnchecked(rng, &p(k, 0), card, p.rows());
          }
        }
        mc_embeddings_.push_back(std::move(draws));
      }
    }
  }
}

const Matrix& SynthEnvironment::embedding_probs(int action) const {
  if (action < 0 || action >= config_.n_actions) {
    throw ParameterError("action " + std::to_string(action) + " out of range");
  }
  return embedding_probs_[action];
}

SynthEnvironment build_env(const SynthConfig& config) {
  config.Validate();
  const SeededRng seeds(config.seed);
  const int na = config.n_actions;
  const int de = config.embedding_dims;
  const int card = config.cardinality;
  const int dx = config.context_dim;

  SynthParameters p;
  {
    RngStream rng = seeds.Stream("alpha");
    p.alpha.reserve(na);
    for (int a = 0; a < na; ++a) p.alpha.push_back(SampleStandardNormal(rng, de, card));
  }
  {
    RngStream rng = seeds.Stream("category_vectors");
    p.category_vectors.reserve(de);
    for (int k = 0; k < de; ++k) {
      p.category_vectors.push_back(SampleStandardNormal(rng, card, dx));
    }
  }
  {
    RngStream rng = seeds.Stream("m");
    p.m = SampleUniform(rng, -1.0, 1.0, dx, dx);
  }
  {
    RngStream rng = seeds.Stream("theta_x");
    p.theta_x = SampleUniform(rng, -1.0, 1.0, dx, 1);
  }
  {
    RngStream rng = seeds.Stream("theta_e");
    p.theta_e = SampleUniform(rng, -1.0, 1.0, dx, 1);
  }
  {
    RngStream rng = seeds.Stream("eta");
    Vector concentration = SampleUniform(rng, 0.0, 1.0, de, 1);
    for (auto& c : concentration) {
      // U[0, 1) can return exactly zero, which Dir() does not admit.
      if (c <= 0.0) c = std::numeric_limits<double>::min();
    }
    p.eta = SampleDirichlet(rng, concentration);
  }
  if (config.reward_kind == RewardKind::kNeural) {
    RngStream rng = seeds.Stream("neural");
    const int width = config.neural_width;
    const int fan_in = dx + de * card;
    NeuralRewardParams nn;
    const double s1 = 1.0 / std::sqrt(static_cast<double>(fan_in));
    const double s2 = 1.0 / std::sqrt(static_cast<double>(width));
    nn.w1 = SampleStandardNormal(rng, fan_in, width) * s1;
    nn.b1 = SampleStandardNormal(rng, width, 1) * s1;
    nn.w2 = SampleStandardNormal(rng, width, width) * s2;
    nn.b2 = SampleStandardNormal(rng, width, 1) * s2;
    nn.w3 = SampleStandardNormal(rng, width, 1) * s2;
    nn.b3 = SampleStandardNormal(rng, 1, 1)(0, 0) * s2;
    p.neural = std::move(nn);
  }
  return SynthEnvironment(config, std::move(p));
}

Matrix embedding_distribution(const SynthEnvironment& env, int action) {
  return env.embedding_probs(action);
}

double expected_reward(const SynthEnvironment& env, const Vector& context,
                       std::span<const int> codes) {
  const SynthConfig& c = env.config();
  if (static_cast<int>(codes.size()) != c.embedding_dims) {
    throw ParameterError("expected one code per embedding dimension");
  }
  if (context.size() != c.context_dim) {
    throw ParameterError("context dimension mismatch");
  }
  for (int code : codes) {
    if (code < 0 || code >= c.cardinality) {
      throw ParameterError("embedding code " + std::to_string(code) +
                           " out of range");
    }
  }
  if (c.reward_kind == RewardKind::kNeural) {
    const NeuralRewardParams& nn = *env.params().neural;
    const Matrix part = NeuralContextPart(nn, context.transpose());
    return NeuralOutputs(nn, part, c.context_dim, c.cardinality, codes.data(),
                         c.embedding_dims, 1)[0];
  }
  double q = 0.0;
  for (int k = 0; k < c.embedding_dims; ++k) {
    q += env.params().eta[k] *
         (env.term_direction()[k].row(codes[k]).dot(context) +
          env.term_offset()[k][codes[k]]);
  }
  return q;
}

double marginal_expected_reward(const SynthEnvironment& env,
                                const Vector& context, int action) {
  if (action < 0 || action >= env.n_actions()) {
    throw ParameterError("action " + std::to_string(action) + " out of range");
  }
  if (context.size() != env.context_dim()) {
    throw ParameterError("context dimension mismatch");
  }
  if (env.config().reward_kind == RewardKind::kLinear) {
    return env.marginal_weights().row(action).dot(context) +
           env.marginal_bias()[action];
  }
  return NeuralMarginal(env, context.transpose())(0, action);
}

Matrix marginal_expected_rewards(const SynthEnvironment& env,
                                 const Matrix& contexts) {
  if (contexts.cols() != env.context_dim()) {
    throw ParameterError("context dimension mismatch");
  }
  if (env.config().reward_kind == RewardKind::kNeural) {
    return NeuralMarginal(env, contexts);
  }
  Matrix q = contexts * env.marginal_weights().transpose();
  q.rowwise() += env.marginal_bias().transpose();
  return q;
}

Matrix sample_contexts(int count, int context_dim, RngStream& rng) {
  if (count < 1 || context_dim < 1) {
    throw ParameterError("context sample shape must be positive");
  }
  return SampleStandardNormal(rng, count, context_dim);
}

LoggedDataset sample_logged_data(const SynthEnvironment& env, int n,
                                 RngStream& rng) {
  if (n < 1) throw ParameterError("n must be >= 1");
  const SynthConfig& c = env.config();
  Matrix contexts = sample_contexts(n, c.context_dim, rng);
  const Matrix q = marginal_expected_rewards(env, contexts);
  PolicyMatrix logging = softmax_policy(q, c.beta);
  const Matrix& probs = logging.probs();

  std::vector<int> actions(static_cast<size_t>(n));
  Vector rewards(n);
  Vector propensities(n);
  const int observed = c.observed_dims();
  CodeMatrix codes(n, observed);
  std::vector<int> full(static_cast<size_t>(c.embedding_dims));
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int t = 0; t < n; ++t) {
    const int a = SampleCategoricalUnchecked(rng, &probs(t, 0), c.n_actions,
                                             probs.rows());
    const Matrix& p = env.embedding_probs(a);
    for (int k = 0; k < c.embedding_dims; ++k) {
      full[k] = SampleCategoricalUnchecked(rng, &p(k, 0), c.cardinality, p.rows());
    }
    const double mean = expected_reward(env, contexts.row(t).transpose(), full);
    // The noise draw happens even when sigma is zero so the stream layout
    // does not depend on it.
    rewards[t] = mean + c.reward_noise_sd * normal(rng.engine());
    actions[t] = a;
    propensities[t] = probs(t, a);
    for (int k = 0; k < observed; ++k) codes(t, k) = full[k];
  }
  return LoggedDataset(std::move(contexts), std::move(actions),
                       std::move(rewards), std::move(propensities),
                       c.n_actions, std::move(codes),
                       std::vector<int>(static_cast<size_t>(observed),
                                        c.cardinality),
                       std::move(logging));
}

PolicyMatrix target_policy(const SynthEnvironment& env,
                           const Matrix& contexts) {
  return epsilon_greedy_policy(marginal_expected_rewards(env, contexts),
                               env.config().epsilon);
}

double true_policy_value(const SynthEnvironment& env,
                         const PolicyMatrix& policy, const Matrix& contexts) {
  if (policy.rows() != contexts.rows() ||
      policy.n_actions() != env.n_actions()) {
    throw ParameterError("policy shape does not match contexts and actions");
  }
  constexpr Eigen::Index kChunk = 4096;
  double total = 0.0;
  for (Eigen::Index start = 0; start < contexts.rows(); start += kChunk) {
    const Eigen::Index len = std::min(kChunk, contexts.rows() - start);
    const Matrix q = marginal_expected_rewards(env, contexts.middleRows(start, len));
    total += (policy.probs().middleRows(start, len).array() * q.array()).sum();
  }
  return total / static_cast<double>(contexts.rows());
}

double true_policy_value(const SynthEnvironment& env, const Matrix& contexts,
                         const PolicyFromValues& policy, int chunk) {
  if (chunk < 1) throw ParameterError("chunk must be positive");
  if (contexts.rows() < 1) throw ParameterError("need evaluation contexts");
  double total = 0.0;
  for (Eigen::Index start = 0; start < contexts.rows(); start += chunk) {
    const Eigen::Index len =
        std::min<Eigen::Index>(chunk, contexts.rows() - start);
    const Matrix q = marginal_expected_rewards(env, contexts.middleRows(start, len));
    const PolicyMatrix pi = policy(q);
    if (pi.rows() != len || pi.n_actions() != env.n_actions()) {
      throw ParameterError("policy function returned the wrong shape");
    }
    total += (pi.probs().array() * q.array()).sum();
  }
  return total / static_cast<double>(contexts.rows());
}

}  // namespace embope

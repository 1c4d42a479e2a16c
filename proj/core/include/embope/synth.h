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

#ifndef EMBOPE_SYNTH_H_
#define EMBOPE_SYNTH_H_

// Synthetic logged-bandit environment with categorical action embeddings.
//
//   p(e | a)   = prod_k softmax(alpha[a](k, :))[e_k]
//   q(x, e)    = sum_k eta_k (x^T M x_{k,e_k} + theta_x^T x + theta_e^T x_{k,e_k})
//   q(x, a)    = E_{p(e|a)} q(x, e)
//   pi_0(.|x)  = softmax(beta q(x, .))
//   pi(.|x)    = epsilon-greedy on q(x, .)
//   r          ~ N(q(x, e), sigma^2)
//
// The neural variant replaces q(x, e) with a random two-hidden-layer tanh
// network over [x, one-hot(e)].

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "embope/bandit.h"
#include "embope/rng.h"
#include "embope/types.h"

namespace embope {

enum class RewardKind { kLinear, kNeural };

struct SynthConfig {
  int context_dim = 10;
  int n_actions = 10;
  int embedding_dims = 3;
  int cardinality = 10;
  double beta = -1.0;
  double epsilon = 0.05;
  double reward_noise_sd = 2.5;
  // Trailing embedding dimensions withheld from the logged data.
  int hidden_dims = 0;
  RewardKind reward_kind = RewardKind::kLinear;
  std::uint64_t seed = 0;

  int neural_width = 50;
  // Exact enumeration of the joint embedding space is used for the neural
  // marginal while cardinality^embedding_dims stays within this budget.
  double enumeration_budget = 1e6;
  int monte_carlo_draws = 4096;

  // Throws ParameterError on violated invariants.
  void Validate() const;
  int observed_dims() const { return embedding_dims - hidden_dims; }
};

struct NeuralRewardParams {
  Matrix w1;  // (d_X + d_E * cardinality) x width
  Vector b1;
  Matrix w2;  // width x width
  Vector b2;
  Vector w3;  // width
  double b3 = 0.0;
};

// Raw draws of every environment parameter.
struct SynthParameters {
  std::vector<Matrix> alpha;             // per action: d_E x cardinality
  Matrix m;                              // d_X x d_X
  Vector theta_x;                        // d_X
  Vector theta_e;                        // d_X
  std::vector<Matrix> category_vectors;  // per dimension: cardinality x d_X
  Vector eta;                            // d_E, on the simplex
  std::optional<NeuralRewardParams> neural;
};

class SynthEnvironment {
 public:
  // Validates shapes and eta, then precomputes the embedding distributions
  // and the per-action linear decomposition of the marginal reward.
  SynthEnvironment(SynthConfig config, SynthParameters params);

  const SynthConfig& config() const { return config_; }
  const SynthParameters& params() const { return params_; }
  int n_actions() const { return config_.n_actions; }
  int context_dim() const { return config_.context_dim; }

  // d_E x cardinality; row k is p(e_k = . | a).
  const Matrix& embedding_probs(int action) const;

  // Linear kind only: q(x, a) = x . marginal_weights.row(a) + marginal_bias[a].
  const Matrix& marginal_weights() const { return marginal_weights_; }
  const Vector& marginal_bias() const { return marginal_bias_; }

  // Linear kind: contribution of dimension k with category c is
  // eta_k (x . term_direction[k].row(c) + term_offset[k][c]).
  const std::vector<Matrix>& term_direction() const { return term_direction_; }
  const std::vector<Vector>& term_offset() const { return term_offset_; }

  // Neural kind with a joint space above the enumeration budget: fixed
  // per-action embedding draws used for the Monte Carlo marginal.
  const std::vector<CodeMatrix>& monte_carlo_embeddings() const {
    return mc_embeddings_;
  }

 private:
  SynthConfig config_;
  SynthParameters params_;
  std::vector<Matrix> embedding_probs_;
  std::vector<Matrix> term_direction_;
  std::vector<Vector> term_offset_;
  Matrix marginal_weights_;
  Vector marginal_bias_;
  std::vector<CodeMatrix> mc_embeddings_;
};

// Draws every parameter from its stated distribution using streams derived
// from config.seed: alpha and x_{k,c} standard normal; M, theta_x, theta_e
// uniform on [-1, 1]; eta ~ Dir(c) with c ~ U[0, 1).
SynthEnvironment build_env(const SynthConfig& config);

Matrix embedding_distribution(const SynthEnvironment& env, int action);

// q(x, e) for a full code vector (length d_E).
double expected_reward(const SynthEnvironment& env, const Vector& context,
                       std::span<const int> codes);

double marginal_expected_reward(const SynthEnvironment& env,
                                const Vector& context, int action);
// m x |A| matrix of q(x_i, a).
Matrix marginal_expected_rewards(const SynthEnvironment& env,
                                 const Matrix& contexts);

Matrix sample_contexts(int count, int context_dim, RngStream& rng);

// Samples (x, a, e, r) with the softmax logging policy. The logged data keeps
// the first d_E - hidden_dims embedding dimensions and carries the full
// logging policy.
LoggedDataset sample_logged_data(const SynthEnvironment& env, int n,
                                 RngStream& rng);

// epsilon-greedy target policy on the true q(x, .), argmax ties to the
// lowest action.
PolicyMatrix target_policy(const SynthEnvironment& env, const Matrix& contexts);

// (1/m) sum_i sum_a pi(a | x_i) q(x_i, a) for a policy materialized on the
// given contexts.
double true_policy_value(const SynthEnvironment& env,
                         const PolicyMatrix& policy, const Matrix& contexts);

// Same value for a policy defined as a function of the q-value rows;
// evaluated in chunks so |contexts| x |A| is never materialized at once.
using PolicyFromValues = std::function<PolicyMatrix(const Matrix& q_values)>;
double true_policy_value(const SynthEnvironment& env, const Matrix& contexts,
                         const PolicyFromValues& policy, int chunk = 4096);

}  // namespace embope

#endif  // EMBOPE_SYNTH_H_

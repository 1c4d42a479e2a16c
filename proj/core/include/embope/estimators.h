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

#ifndef EMBOPE_ESTIMATORS_H_
#define EMBOPE_ESTIMATORS_H_

// Off-policy value estimators. Every function takes the logged data and the
// target policy evaluated on the logged contexts (one row per sample).
// Model-based estimators take either a RewardModel or its n x |A| prediction
// matrix q_hat on the logged contexts.

#include <utility>
#include <vector>

#include "embope/bandit.h"
#include "embope/multinomial.h"
#include "embope/reward_model.h"
#include "embope/synth.h"
#include "embope/types.h"

namespace embope {

struct MipsConfig {
  MultinomialOptions classifier;
  // Lower bound on the marginal-weight denominator.
  double propensity_floor = 1e-10;
  // Fit p_hat(a | x, e) on [x, e] and use w_t = sum_a p_hat(a | x_t, e_t)
  // pi(a | x_t) / max(pi_0(a | x_t), floor) instead of the Bayes form.
  bool context_features = false;

  void Validate() const;
};

EstimatorResult ips(const LoggedDataset& data, const PolicyMatrix& target);

// Throws DegenerateInputError when every weight is zero.
EstimatorResult snips(const LoggedDataset& data, const PolicyMatrix& target);

EstimatorResult dm(const LoggedDataset& data, const PolicyMatrix& target,
                   const Matrix& q_hat);
EstimatorResult dm(const LoggedDataset& data, const PolicyMatrix& target,
                   const RewardModel& model);

EstimatorResult dr(const LoggedDataset& data, const PolicyMatrix& target,
                   const Matrix& q_hat);
EstimatorResult dr(const LoggedDataset& data, const PolicyMatrix& target,
                   const RewardModel& model);

// DM term plus the DR correction restricted to samples with w_t <= tau.
EstimatorResult switch_dr(const LoggedDataset& data,
                          const PolicyMatrix& target, const Matrix& q_hat,
                          double tau);
EstimatorResult switch_dr(const LoggedDataset& data,
                          const PolicyMatrix& target, const RewardModel& model,
                          double tau);

// Per-sample marginal weights w_t = E_{p(a | x_t, e_t)}[pi(a | x_t) / pi_0(a | x_t)].
// p_hat(a | e) is a multinomial logistic regression of the logged actions on
// the embeddings; with embeddings drawn independently of the context given
// the action, Bayes' rule gives p(a | x, e) proportional to
// pi_0(a | x) p_hat(a | e) / p_bar(a), p_bar(a) = mean_t pi_0(a | x_t):
//   w_t = sum_a pi(a | x_t) r_ta / max(sum_a pi_0(a | x_t) r_ta, floor),
//   r_ta = p_hat(a | e_t) / p_bar(a).
// Under context-free logging this is exactly sum_a p_hat(a | e_t) pi(a) /
// pi_0(a). Classes are the actions present in the data; unlogged actions get
// p_hat = 0. Requires the dataset's logging policy.
Vector mips_weights(const LoggedDataset& data, const PolicyMatrix& target,
                    const Matrix& embedding_features, const MipsConfig& config);

// Real-valued embeddings (n x d) used as classifier features directly.
EstimatorResult mips(const LoggedDataset& data, const PolicyMatrix& target,
                     const Matrix& sample_embeddings,
                     const MipsConfig& config = {});
// Categorical embeddings, one-hot encoded per dimension.
EstimatorResult mips(const LoggedDataset& data, const PolicyMatrix& target,
                     const CodeMatrix& codes,
                     const std::vector<int>& cardinalities,
                     const MipsConfig& config = {});
// The dataset's own observed embeddings.
EstimatorResult mips(const LoggedDataset& data, const PolicyMatrix& target,
                     const MipsConfig& config = {});

// n x sum(cardinalities) one-hot encoding.
Matrix one_hot_codes(const CodeMatrix& codes,
                     const std::vector<int>& cardinalities);

// Exact embedding marginals from the environment over the observed
// dimensions: w_t = p(e_t | pi, x_t) / p(e_t | pi_0, x_t). Throws
// DegenerateInputError when the logging marginal of an observed e_t is zero.
EstimatorResult mips_true(const SynthEnvironment& env,
                          const LoggedDataset& data,
                          const PolicyMatrix& target);

struct SlopeSelection {
  // Subsets in the order they were considered; element 0 is the full set.
  std::vector<std::vector<int>> subsets;
  std::vector<double> estimates;
  std::vector<double> half_widths;
  // Index into `subsets` of the selected subset; every subset up to it was
  // accepted.
  int chosen_index = 0;
  const std::vector<int>& chosen() const { return subsets[chosen_index]; }
};

// Starting from all dimensions, repeatedly drops the dimension whose removal
// gives the smallest standard error and keeps the smaller subset while its
// +-2 SE interval intersects every previously accepted interval.
std::pair<EstimatorResult, SlopeSelection> mips_slope(
    const LoggedDataset& data, const PolicyMatrix& target,
    const CodeMatrix& codes, const std::vector<int>& cardinalities,
    const MipsConfig& config = {});
std::pair<EstimatorResult, SlopeSelection> mips_slope(
    const LoggedDataset& data, const PolicyMatrix& target,
    const CategoricalEmbeddingTable& table, const MipsConfig& config = {});

// Trains the reward model, embeds every sample with it and applies mips.
EstimatorResult learned_mips(const LoggedDataset& data,
                             const PolicyMatrix& target, InputRepr repr,
                             const TrainConfig& train_config,
                             const MipsConfig& mips_config = {},
                             const CategoricalEmbeddingTable* table = nullptr);
// Same with an already trained model (e.g. the one shared with DM).
EstimatorResult learned_mips(const LoggedDataset& data,
                             const PolicyMatrix& target,
                             const RewardModel& model,
                             const MipsConfig& mips_config = {},
                             const CategoricalEmbeddingTable* table = nullptr);

}  // namespace embope

#endif  // EMBOPE_ESTIMATORS_H_

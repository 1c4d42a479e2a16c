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

#ifndef EMBOPE_REWARD_MODEL_H_
#define EMBOPE_REWARD_MODEL_H_

// Linear reward model whose action-side output doubles as a learned action
// embedding:
//
//   u(a) = phi(a)^T E          (the embedding of the action)
//   r_hat(x, a) = <u(a), P^T x> + b
//
// phi(a) is a binary feature vector (one-hot identity, one-hot categorical
// embedding, or both). Without a context projection P the embedding lives in
// context space and the prediction is a plain dot product with x.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "embope/bandit.h"
#include "embope/types.h"

namespace embope {

using FeatureMap = Eigen::SparseMatrix<double, Eigen::RowMajor>;

enum class InputRepr { kOneHot, kPredefined, kCombined };

const char* InputReprName(InputRepr repr);

// OneHot: |A| x |A| identity. Predefined: per-dimension one-hot encodings of
// the table's codes, concatenated (width sum of cardinalities). Combined: the
// two side by side. Throws ParameterError when the table is required but
// missing or does not cover n_actions.
FeatureMap build_action_features(InputRepr repr, int n_actions,
                                 const CategoricalEmbeddingTable* table = nullptr);

struct TrainConfig {
  double learning_rate = 0.01;
  int epochs = 200;
  int batch_size = 256;
  double l2 = 0.0;
  std::uint64_t seed = 0;
  // Width of the learned embedding with a context projection; 0 means full
  // rank (width d_X, no projection).
  int embedding_size = 0;
  bool use_bias = false;
  double init_sd = 0.01;
  // Learning rate multiplier applied after every epoch.
  double lr_decay = 1.0;

  void Validate() const;
};

struct TrainInfo {
  int epochs_run = 0;
  double final_mse = 0.0;
  // Full-data MSE at initialization and after every epoch.
  std::vector<double> mse_history;
};

struct RewardModel {
  InputRepr repr = InputRepr::kOneHot;
  int n_actions = 0;
  // Cardinalities of the categorical part of the features (empty for OneHot).
  std::vector<int> cardinalities;
  FeatureMap action_feature_map;      // |A| x f
  Matrix embedding_layer;             // f x d_emb
  std::optional<Matrix> context_projection;  // d_X x d_emb
  bool has_bias = false;
  double bias = 0.0;
  TrainInfo info;

  int embedding_size() const { return static_cast<int>(embedding_layer.cols()); }
  int feature_width() const { return static_cast<int>(embedding_layer.rows()); }
};

// Fits the model by Adam on mini-batches with a seeded per-epoch shuffle,
// minimizing mean squared error + (l2 / 2)(||E||^2 + ||P||^2).
//
// For Predefined and Combined inputs each sample's categorical features come
// from its own observed embedding when the dataset has one, else from
// `table`. The stored action_feature_map uses `table` when given; otherwise
// each action takes the most frequent logged code per dimension (lowest code
// on ties, code 0 for unlogged actions).
//
// Throws TrainingDivergenceError when the loss becomes non-finite.
RewardModel train_reward_model(const LoggedDataset& data, InputRepr repr,
                               const TrainConfig& config,
                               const CategoricalEmbeddingTable* table = nullptr);

// |A| x d_emb; row a is phi(a)^T E.
Matrix extract_embeddings(const RewardModel& model);

// n x d_emb; row t is phi_t^T E for the features the model was trained on
// (sample embedding codes where applicable).
Matrix sample_embeddings(const RewardModel& model, const LoggedDataset& data,
                         const CategoricalEmbeddingTable* table = nullptr);

Vector predict_reward(const RewardModel& model, const Matrix& contexts,
                      int action);
// m x |A| matrix of predictions for every action.
Matrix predict_all(const RewardModel& model, const Matrix& contexts);

struct RewardModelGradient {
  Matrix embedding_layer;
  Matrix context_projection;  // empty without a projection
  double bias = 0.0;
};

// Full-data training objective at the model's parameters, with its gradient
// when `gradient` is non-null. Exposed for derivative checks.
double reward_model_objective(const RewardModel& model,
                              const LoggedDataset& data, double l2,
                              RewardModelGradient* gradient,
                              const CategoricalEmbeddingTable* table = nullptr);

// [x, 1]: with a constant context feature the dot product carries a
// per-action intercept in the last embedding coordinate.
Matrix with_intercept_column(const Matrix& contexts);

// JSON document with the feature map shape, the parameter matrices and the
// training metadata.
std::string reward_model_to_json(const RewardModel& model);

}  // namespace embope

#endif  // EMBOPE_REWARD_MODEL_H_

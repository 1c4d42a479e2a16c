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

#ifndef EMBOPE_BANDIT_H_
#define EMBOPE_BANDIT_H_

// Data model for logged bandit feedback and the elementary policies used to
// generate and evaluate it.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "embope/types.h"

namespace embope {

// n x |A| row-stochastic matrix of action probabilities, one row per context.
class PolicyMatrix {
 public:
  static constexpr double kRowSumTolerance = 1e-9;

  // Validates non-negativity and row sums; throws ParameterError otherwise.
  explicit PolicyMatrix(Matrix probs);

  const Matrix& probs() const { return probs_; }
  int rows() const { return static_cast<int>(probs_.rows()); }
  int n_actions() const { return static_cast<int>(probs_.cols()); }
  double operator()(int row, int action) const { return probs_(row, action); }

  PolicyMatrix Subset(std::span<const int> rows) const;

 private:
  Matrix probs_;
};

// Per-action categorical codes (|A| x d_E). cardinalities[k] is the number of
// categories of dimension k.
class CategoricalEmbeddingTable {
 public:
  CategoricalEmbeddingTable(CodeMatrix codes, std::vector<int> cardinalities);
  CategoricalEmbeddingTable(CodeMatrix codes, int cardinality);

  const CodeMatrix& codes() const { return codes_; }
  const std::vector<int>& cardinalities() const { return cardinalities_; }
  int n_actions() const { return static_cast<int>(codes_.rows()); }
  int dims() const { return static_cast<int>(codes_.cols()); }

  // Codes of every logged sample: row t is the code vector of actions[t].
  CodeMatrix ForActions(std::span<const int> actions) const;
  // Keeps only the listed dimensions, in the listed order.
  CategoricalEmbeddingTable SelectDims(std::span<const int> dims) const;

 private:
  CodeMatrix codes_;
  std::vector<int> cardinalities_;
};

// n records of (context, action, observed embedding, reward, propensity).
// Immutable after construction; the constructor enforces the invariants.
//
// `logging_policy`, when present, holds pi_0(.|x_t) for every action. The
// marginalized estimators need it; logged propensities alone suffice for
// IPS-family estimators.
class LoggedDataset {
 public:
  LoggedDataset(Matrix contexts, std::vector<int> actions, Vector rewards,
                Vector logging_propensities, int n_actions,
                std::optional<CodeMatrix> observed_embeddings = std::nullopt,
                std::optional<std::vector<int>> embedding_cardinalities =
                    std::nullopt,
                std::optional<PolicyMatrix> logging_policy = std::nullopt);

  int size() const { return static_cast<int>(actions_.size()); }
  int n_actions() const { return n_actions_; }
  int context_dim() const { return static_cast<int>(contexts_.cols()); }

  const Matrix& contexts() const { return contexts_; }
  const std::vector<int>& actions() const { return actions_; }
  const Vector& rewards() const { return rewards_; }
  const Vector& logging_propensities() const { return propensities_; }

  bool has_embeddings() const { return embeddings_.has_value(); }
  const CodeMatrix& observed_embeddings() const;
  const std::vector<int>& embedding_cardinalities() const;

  bool has_logging_policy() const { return logging_policy_.has_value(); }
  const PolicyMatrix& logging_policy() const;

  // Rows in the given order (duplicates allowed, as in bootstrap resampling).
  LoggedDataset Subset(std::span<const int> rows) const;
  LoggedDataset WithLoggingPolicy(PolicyMatrix policy) const;
  LoggedDataset WithEmbeddings(CodeMatrix codes,
                               std::vector<int> cardinalities) const;
  // Same records with a replacement n x d context matrix.
  LoggedDataset WithContexts(Matrix contexts) const;

 private:
  Matrix contexts_;
  std::vector<int> actions_;
  Vector rewards_;
  Vector propensities_;
  int n_actions_;
  std::optional<CodeMatrix> embeddings_;
  std::vector<int> cardinalities_;
  std::optional<PolicyMatrix> logging_policy_;
};

struct EstimatorResult {
  double estimate = 0.0;
  std::map<std::string, double> diagnostics;
};

// Index of the row maximum; ties go to the lowest index.
int ArgmaxLowestIndex(const Eigen::Ref<const Vector>& row);

// (1 - eps) * 1{a = argmax q} + eps / |A| per row.
PolicyMatrix epsilon_greedy_policy(const Matrix& q_values, double epsilon);

// Row-wise softmax of beta * q with max subtraction.
PolicyMatrix softmax_policy(const Matrix& q_values, double beta);

PolicyMatrix uniform_policy(int rows, int n_actions);

// The same context-free distribution repeated on every row.
PolicyMatrix broadcast_policy(const Vector& probs, int rows);

}  // namespace embope

#endif  // EMBOPE_BANDIT_H_

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

#include "embope/bandit.h"

#include <cmath>
#include <sstream>

#include "embope/errors.h"

namespace embope {
namespace {

void RequireFinite(const Matrix& m, const char* what) {
  if (!m.allFinite()) {
    throw ParameterError(std::string(what) + " contains non-finite values");
  }
}

}  // namespace

PolicyMatrix::PolicyMatrix(Matrix probs) : probs_(std::move(probs)) {
  if (probs_.rows() == 0 || probs_.cols() == 0) {
    throw ParameterError("policy matrix must be non-empty");
  }
  RequireFinite(probs_, "policy matrix");
  for (Eigen::Index i = 0; i < probs_.rows(); ++i) {
    if (probs_.row(i).minCoeff() < 0.0) {
      std::ostringstream msg;
      msg << "policy row " << i << " has a negative probability";
      throw ParameterError(msg.str());
    }
    const double sum = probs_.row(i).sum();
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      std::ostringstream msg;
      msg << "policy row " << i << " sums to " << sum;
      throw ParameterError(msg.str());
    }
  }
}

PolicyMatrix PolicyMatrix::Subset(std::span<const int> rows) const {
  Matrix out(static_cast<Eigen::Index>(rows.size()), probs_.cols());
  for (size_t i = 0; i < rows.size(); ++i) out.row(i) = probs_.row(rows[i]);
  return PolicyMatrix(std::move(out));
}

CategoricalEmbeddingTable::CategoricalEmbeddingTable(
    CodeMatrix codes, std::vector<int> cardinalities)
    : codes_(std::move(codes)), cardinalities_(std::move(cardinalities)) {
  if (static_cast<Eigen::Index>(cardinalities_.size()) != codes_.cols()) {
    throw ParameterError("one cardinality per embedding dimension required");
  }
  for (Eigen::Index k = 0; k < codes_.cols(); ++k) {
    if (cardinalities_[k] < 1) {
      throw ParameterError("embedding cardinality must be positive");
    }
    for (Eigen::Index a = 0; a < codes_.rows(); ++a) {
      if (codes_(a, k) < 0 || codes_(a, k) >= cardinalities_[k]) {
        std::ostringstream msg;
        msg << "embedding code " << codes_(a, k) << " of action " << a
            << " dimension " << k << " outside [0, " << cardinalities_[k]
            << ")";
        throw ParameterError(msg.str());
      }
    }
  }
}

CategoricalEmbeddingTable::CategoricalEmbeddingTable(CodeMatrix codes,
                                                     int cardinality)
    : CategoricalEmbeddingTable(
          codes, std::vector<int>(static_cast<size_t>(codes.cols()),
                                  cardinality)) {}

CodeMatrix CategoricalEmbeddingTable::ForActions(
    std::span<const int> actions) const {
  CodeMatrix out(static_cast<Eigen::Index>(actions.size()), codes_.cols());
  for (size_t t = 0; t < actions.size(); ++t) {
    if (actions[t] < 0 || actions[t] >= codes_.rows()) {
      throw ParameterError("action index outside the embedding table");
    }
    out.row(t) = codes_.row(actions[t]);
  }
  return out;
}

CategoricalEmbeddingTable CategoricalEmbeddingTable::SelectDims(
    std::span<const int> dims) const {
  CodeMatrix out(codes_.rows(), static_cast<Eigen::Index>(dims.size()));
  std::vector<int> cards;
  for (size_t j = 0; j < dims.size(); ++j) {
    if (dims[j] < 0 || dims[j] >= codes_.cols()) {
      throw ParameterError("embedding dimension out of range");
    }
    out.col(j) = codes_.col(dims[j]);
    cards.push_back(cardinalities_[dims[j]]);
  }
  return CategoricalEmbeddingTable(std::move(out), std::move(cards));
}

LoggedDataset::LoggedDataset(Matrix contexts, std::vector<int> actions,
                             Vector rewards, Vector logging_propensities,
                             int n_actions,
                             std::optional<CodeMatrix> observed_embeddings,
                             std::optional<std::vector<int>> cardinalities,
                             std::optional<PolicyMatrix> logging_policy)
    : contexts_(std::move(contexts)),
      actions_(std::move(actions)),
      rewards_(std::move(rewards)),
      propensities_(std::move(logging_propensities)),
      n_actions_(n_actions),
      embeddings_(std::move(observed_embeddings)),
      logging_policy_(std::move(logging_policy)) {
  const auto n = static_cast<Eigen::Index>(actions_.size());
  if (n < 1) throw ParameterError("logged dataset must hold at least 1 record");
  if (n_actions_ < 1) throw ParameterError("n_actions must be positive");
  if (contexts_.rows() != n || rewards_.size() != n ||
      propensities_.size() != n) {
    throw ParameterError(
        "contexts, actions, rewards and propensities must have equal length");
  }
  RequireFinite(contexts_, "contexts");
  RequireFinite(rewards_, "rewards");
  for (Eigen::Index t = 0; t < n; ++t) {
    const int a = actions_[t];
    if (a < 0 || a >= n_actions_) {
      std::ostringstream msg;
      msg << "action " << a << " at record " << t << " outside [0, "
          << n_actions_ << ")";
      throw ParameterError(msg.str());
    }
    const double p = propensities_[t];
    if (!(p > 0.0 && p <= 1.0)) {
      std::ostringstream msg;
      msg << "logging propensity " << p << " at record " << t
          << " outside (0, 1]";
      throw ParameterError(msg.str());
    }
  }
  if (embeddings_) {
    if (embeddings_->rows() != n) {
      throw ParameterError("observed embeddings must have one row per record");
    }
    if (cardinalities) {
      cardinalities_ = std::move(*cardinalities);
    } else {
      cardinalities_.assign(static_cast<size_t>(embeddings_->cols()), 0);
      for (Eigen::Index k = 0; k < embeddings_->cols(); ++k) {
        cardinalities_[k] =
            embeddings_->rows() > 0 ? embeddings_->col(k).maxCoeff() + 1 : 1;
      }
    }
    if (static_cast<Eigen::Index>(cardinalities_.size()) !=
        embeddings_->cols()) {
      throw ParameterError("one cardinality per embedding dimension required");
    }
    for (Eigen::Index k = 0; k < embeddings_->cols(); ++k) {
      for (Eigen::Index t = 0; t < n; ++t) {
        const int c = (*embeddings_)(t, k);
        if (c < 0 || c >= cardinalities_[k]) {
          std::ostringstream msg;
          msg << "embedding code " << c << " at record " << t << " dimension "
              << k << " outside [0, " << cardinalities_[k] << ")";
          throw ParameterError(msg.str());
        }
      }
    }
  }
  if (logging_policy_) {
    if (logging_policy_->rows() != n ||
        logging_policy_->n_actions() != n_actions_) {
      throw ParameterError("logging policy must be n x n_actions");
    }
    for (int t = 0; t < n; ++t) {
      if (std::abs((*logging_policy_)(t, actions_[t]) - propensities_[t]) >
          PolicyMatrix::kRowSumTolerance) {
        throw ParameterError("logging policy disagrees with the propensity of "
                             "record " + std::to_string(t));
      }
    }
  }
}

const CodeMatrix& LoggedDataset::observed_embeddings() const {
  if (!embeddings_) throw ParameterError("dataset has no observed embeddings");
  return *embeddings_;
}

const std::vector<int>& LoggedDataset::embedding_cardinalities() const {
  if (!embeddings_) throw ParameterError("dataset has no observed embeddings");
  return cardinalities_;
}

const PolicyMatrix& LoggedDataset::logging_policy() const {
  if (!logging_policy_) {
    throw ParameterError("dataset carries no full logging policy");
  }
  return *logging_policy_;
}

LoggedDataset LoggedDataset::Subset(std::span<const int> rows) const {
  const auto m = static_cast<Eigen::Index>(rows.size());
  Matrix x(m, contexts_.cols());
  std::vector<int> a(rows.size());
  Vector r(m), p(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const int src = rows[i];
    if (src < 0 || src >= size()) throw ParameterError("subset row out of range");
    x.row(i) = contexts_.row(src);
    a[i] = actions_[src];
    r[i] = rewards_[src];
    p[i] = propensities_[src];
  }
  std::optional<CodeMatrix> emb;
  std::optional<std::vector<int>> cards;
  if (embeddings_) {
    CodeMatrix e(m, embeddings_->cols());
    for (Eigen::Index i = 0; i < m; ++i) e.row(i) = embeddings_->row(rows[i]);
    emb = std::move(e);
    cards = cardinalities_;
  }
  std::optional<PolicyMatrix> pol;
  if (logging_policy_) pol = logging_policy_->Subset(rows);
  return LoggedDataset(std::move(x), std::move(a), std::move(r), std::move(p),
                       n_actions_, std::move(emb), std::move(cards),
                       std::move(pol));
}

LoggedDataset LoggedDataset::WithLoggingPolicy(PolicyMatrix policy) const {
  std::optional<std::vector<int>> cards;
  if (embeddings_) cards = cardinalities_;
  return LoggedDataset(contexts_, actions_, rewards_, propensities_,
                       n_actions_, embeddings_, std::move(cards),
                       std::move(policy));
}

LoggedDataset LoggedDataset::WithEmbeddings(
    CodeMatrix codes, std::vector<int> cardinalities) const {
  return LoggedDataset(contexts_, actions_, rewards_, propensities_,
                       n_actions_, std::move(codes), std::move(cardinalities),
                       logging_policy_);
}

LoggedDataset LoggedDataset::WithContexts(Matrix contexts) const {
  if (contexts.rows() != contexts_.rows()) {
    throw ParameterError("replacement contexts must have one row per sample");
  }
  std::optional<CodeMatrix> codes = embeddings_;
  std::optional<std::vector<int>> cards;
  if (codes) cards = cardinalities_;
  return LoggedDataset(std::move(contexts), actions_, rewards_, propensities_,
                       n_actions_, std::move(codes), std::move(cards),
                       logging_policy_);
}

int ArgmaxLowestIndex(const Eigen::Ref<const Vector>& row) {
  int best = 0;
  for (Eigen::Index a = 1; a < row.size(); ++a) {
    if (row[a] > row[best]) best = static_cast<int>(a);
  }
  return best;
}

PolicyMatrix epsilon_greedy_policy(const Matrix& q_values, double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw ParameterError("epsilon must lie in [0, 1]");
  }
  RequireFinite(q_values, "q_values");
  const auto n_actions = q_values.cols();
  Matrix probs = Matrix::Constant(q_values.rows(), n_actions,
                                  epsilon / static_cast<double>(n_actions));
  for (Eigen::Index i = 0; i < q_values.rows(); ++i) {
    const Vector row = q_values.row(i).transpose();
    probs(i, ArgmaxLowestIndex(row)) += 1.0 - epsilon;
  }
  return PolicyMatrix(std::move(probs));
}

PolicyMatrix softmax_policy(const Matrix& q_values, double beta) {
  RequireFinite(q_values, "q_values");
  if (!std::isfinite(beta)) throw ParameterError("beta must be finite");
  Matrix probs(q_values.rows(), q_values.cols());
  for (Eigen::Index i = 0; i < q_values.rows(); ++i) {
    const auto scaled = (beta * q_values.row(i)).eval();
    const double shift = scaled.maxCoeff();
    probs.row(i) = (scaled.array() - shift).exp().matrix();
    probs.row(i) /= probs.row(i).sum();
  }
  return PolicyMatrix(std::move(probs));
}

PolicyMatrix uniform_policy(int rows, int n_actions) {
  if (rows < 1 || n_actions < 1) {
    throw ParameterError("uniform policy needs positive shape");
  }
  return PolicyMatrix(
      Matrix::Constant(rows, n_actions, 1.0 / static_cast<double>(n_actions)));
}

PolicyMatrix broadcast_policy(const Vector& probs, int rows) {
  if (rows < 1) throw ParameterError("broadcast policy needs rows >= 1");
  return PolicyMatrix(probs.transpose().replicate(rows, 1));
}

}  // namespace embope

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

#include "embope/estimators.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "embope/errors.h"

namespace embope {
namespace {

void CheckTarget(const LoggedDataset& data, const PolicyMatrix& target) {
  if (target.rows() != data.size()) {
    throw ParameterError("target policy needs one row per logged sample");
  }
  if (target.n_actions() != data.n_actions()) {
    throw ParameterError("target policy action count does not match the data");
  }
}

void CheckModelPredictions(const LoggedDataset& data, const Matrix& q_hat) {
  if (q_hat.rows() != data.size() || q_hat.cols() != data.n_actions()) {
    throw ParameterError("q_hat must be n x |A|");
  }
  if (!q_hat.allFinite()) throw ParameterError("q_hat is not finite");
}

Vector ImportanceWeights(const LoggedDataset& data,
                         const PolicyMatrix& target) {
  CheckTarget(data, target);
  Vector w(data.size());
  for (int t = 0; t < data.size(); ++t) {
    w[t] = target(t, data.actions()[t]) / data.logging_propensities()[t];
  }
  return w;
}

void AddWeightDiagnostics(const Vector& w, EstimatorResult& result) {
  result.diagnostics["mean_weight"] = w.mean();
  result.diagnostics["max_weight"] = w.maxCoeff();
  const double sq = w.squaredNorm();
  result.diagnostics["effective_sample_size"] =
      sq > 0.0 ? w.sum() * w.sum() / sq : 0.0;
}

EstimatorResult Finish(double estimate, EstimatorResult result) {
  if (!std::isfinite(estimate)) {
    throw DegenerateInputError("estimate is not finite");
  }
  result.estimate = estimate;
  return result;
}

// (1/n) sum_t sum_a pi(a | x_t) q_hat(x_t, a).
double DirectTerm(const PolicyMatrix& target, const Matrix& q_hat) {
  return (target.probs().array() * q_hat.array()).sum() /
         static_cast<double>(q_hat.rows());
}

EstimatorResult WeightedMean(const LoggedDataset& data, const Vector& w) {
  EstimatorResult result;
  AddWeightDiagnostics(w, result);
  return Finish(w.dot(data.rewards()) / static_cast<double>(data.size()),
                std::move(result));
}

}  // namespace

void MipsConfig::Validate() const {
  if (!(propensity_floor > 0.0)) {
    throw ParameterError("propensity_floor must be positive");
  }
}

EstimatorResult ips(const LoggedDataset& data, const PolicyMatrix& target) {
  return WeightedMean(data, ImportanceWeights(data, target));
}

EstimatorResult snips(const LoggedDataset& data, const PolicyMatrix& target) {
  const Vector w = ImportanceWeights(data, target);
  const double total = w.sum();
  if (!(total > 0.0)) {
    throw DegenerateInputError("SNIPS is undefined: all weights are zero");
  }
  EstimatorResult result;
  AddWeightDiagnostics(w, result);
  return Finish(w.dot(data.rewards()) / total, std::move(result));
}

EstimatorResult dm(const LoggedDataset& data, const PolicyMatrix& target,
                   const Matrix& q_hat) {
  CheckTarget(data, target);
  CheckModelPredictions(data, q_hat);
  return Finish(DirectTerm(target, q_hat), {});
}

EstimatorResult dm(const LoggedDataset& data, const PolicyMatrix& target,
                   const RewardModel& model) {
  return dm(data, target, predict_all(model, data.contexts()));
}

EstimatorResult dr(const LoggedDataset& data, const PolicyMatrix& target,
                   const Matrix& q_hat) {
  const Vector w = ImportanceWeights(data, target);
  CheckModelPredictions(data, q_hat);
  double correction = 0.0;
  for (int t = 0; t < data.size(); ++t) {
    correction += w[t] * (data.rewards()[t] - q_hat(t, data.actions()[t]));
  }
  EstimatorResult result;
  AddWeightDiagnostics(w, result);
  const double direct = DirectTerm(target, q_hat);
  result.diagnostics["direct_term"] = direct;
  return Finish(direct + correction / static_cast<double>(data.size()),
                std::move(result));
}

EstimatorResult dr(const LoggedDataset& data, const PolicyMatrix& target,
                   const RewardModel& model) {
  return dr(data, target, predict_all(model, data.contexts()));
}

EstimatorResult switch_dr(const LoggedDataset& data,
                          const PolicyMatrix& target, const Matrix& q_hat,
                          double tau) {
  if (!(tau > 0.0)) throw ParameterError("tau must be positive");
  const Vector w = ImportanceWeights(data, target);
  CheckModelPredictions(data, q_hat);
  double correction = 0.0;
  int switched = 0;
  for (int t = 0; t < data.size(); ++t) {
    if (w[t] <= tau) {
      correction += w[t] * (data.rewards()[t] - q_hat(t, data.actions()[t]));
    } else {
      ++switched;
    }
  }
  EstimatorResult result;
  AddWeightDiagnostics(w, result);
  result.diagnostics["switched_fraction"] =
      static_cast<double>(switched) / data.size();
  return Finish(DirectTerm(target, q_hat) +
                    correction / static_cast<double>(data.size()),
                std::move(result));
}

EstimatorResult switch_dr(const LoggedDataset& data,
                          const PolicyMatrix& target, const RewardModel& model,
                          double tau) {
  return switch_dr(data, target, predict_all(model, data.contexts()), tau);
}

Vector mips_weights(const LoggedDataset& data, const PolicyMatrix& target,
                    const Matrix& embedding_features,
                    const MipsConfig& config) {
  config.Validate();
  CheckTarget(data, target);
  if (embedding_features.rows() != data.size()) {
    throw ParameterError("need one embedding row per logged sample");
  }
  if (!data.has_logging_policy()) {
    throw ParameterError(
        "marginal weights need the logging policy over all actions");
  }
  const Matrix& pi0 = data.logging_policy().probs();
  const Matrix& pi = target.probs();

  // Compact labels over the actions that occur in the data, in action order.
  std::vector<char> seen(static_cast<size_t>(data.n_actions()), 0);
  for (int a : data.actions()) seen[a] = 1;
  std::vector<int> class_of(static_cast<size_t>(data.n_actions()), -1);
  std::vector<int> action_of;
  for (int a = 0; a < data.n_actions(); ++a) {
    if (seen[a]) {
      class_of[a] = static_cast<int>(action_of.size());
      action_of.push_back(a);
    }
  }
  std::vector<int> labels(static_cast<size_t>(data.size()));
  for (int t = 0; t < data.size(); ++t) labels[t] = class_of[data.actions()[t]];

  const int k = static_cast<int>(action_of.size());
  if (config.context_features) {
    Matrix xe(data.size(), data.context_dim() + embedding_features.cols());
    xe << data.contexts(), embedding_features;
    const MultinomialClassifier clf =
        fit_multinomial(xe, labels, k, config.classifier);
    const Matrix posterior = predict_proba(clf, xe);
    Vector w = Vector::Zero(data.size());
    for (int t = 0; t < data.size(); ++t) {
      for (int c = 0; c < k; ++c) {
        const int a = action_of[c];
        w[t] += posterior(t, c) * pi(t, a) /
                std::max(pi0(t, a), config.propensity_floor);
      }
    }
    return w;
  }
  // Logging marginal p_bar(a) = mean_t pi_0(a | x_t). The empirical action
  // frequency would drop the target mass of unlogged actions.
  const Vector marginal = pi0.colwise().mean().transpose();
  const MultinomialClassifier clf =
      fit_multinomial(embedding_features, labels, k, config.classifier);
  const Matrix posterior = predict_proba(clf, embedding_features);
  // p_hat(a | e) / p_bar(a) is proportional to p(e | a), so
  //   p(a | x, e) = pi_0(a | x) r(a, e) / sum_b pi_0(b | x) r(b, e)
  // and w_t = E_{p(a | x_t, e_t)}[pi / pi_0] needs no division by pi_0(a | x).
  // Under context-free logging den is sum_a p_hat(a | e_t) = 1.
  Vector w(data.size());
  for (int t = 0; t < data.size(); ++t) {
    double num = 0.0, den = 0.0;
    for (int c = 0; c < k; ++c) {
      const int a = action_of[c];
      const double ratio = posterior(t, c) / marginal[a];
      num += pi(t, a) * ratio;
      den += pi0(t, a) * ratio;
    }
    w[t] = num / std::max(den, config.propensity_floor);
  }
  return w;
}

EstimatorResult mips(const LoggedDataset& data, const PolicyMatrix& target,
                     const Matrix& sample_embeddings,
                     const MipsConfig& config) {
  return WeightedMean(data,
                      mips_weights(data, target, sample_embeddings, config));
}

Matrix one_hot_codes(const CodeMatrix& codes,
                     const std::vector<int>& cardinalities) {
  if (static_cast<Eigen::Index>(cardinalities.size()) != codes.cols()) {
    throw ParameterError("one cardinality per embedding dimension required");
  }
  int width = 0;
  for (int c : cardinalities) width += c;
  Matrix out = Matrix::Zero(codes.rows(), width);
  int offset = 0;
  for (Eigen::Index k = 0; k < codes.cols(); ++k) {
    for (Eigen::Index t = 0; t < codes.rows(); ++t) {
      const int code = codes(t, k);
      if (code < 0 || code >= cardinalities[k]) {
        throw ParameterError("embedding code out of range");
      }
      out(t, offset + code) = 1.0;
    }
    offset += cardinalities[k];
  }
  return out;
}

EstimatorResult mips(const LoggedDataset& data, const PolicyMatrix& target,
                     const CodeMatrix& codes,
                     const std::vector<int>& cardinalities,
                     const MipsConfig& config) {
  return mips(data, target, one_hot_codes(codes, cardinalities), config);
}

EstimatorResult mips(const LoggedDataset& data, const PolicyMatrix& target,
                     const MipsConfig& config) {
  if (!data.has_embeddings()) {
    throw ParameterError("dataset has no observed embeddings");
  }
  return mips(data, target, data.observed_embeddings(),
              data.embedding_cardinalities(), config);
}

EstimatorResult mips_true(const SynthEnvironment& env,
                          const LoggedDataset& data,
                          const PolicyMatrix& target) {
  CheckTarget(data, target);
  if (data.n_actions() != env.n_actions()) {
    throw ParameterError("environment and data disagree on |A|");
  }
  if (!data.has_embeddings() || !data.has_logging_policy()) {
    throw ParameterError("mips_true needs embeddings and the logging policy");
  }
  const CodeMatrix& codes = data.observed_embeddings();
  const int observed = static_cast<int>(codes.cols());
  if (observed > env.config().embedding_dims) {
    throw ParameterError("more observed dimensions than the environment has");
  }
  const Matrix& pi0 = data.logging_policy().probs();
  const Matrix& pi = target.probs();
  const int na = env.n_actions();
  Vector w(data.size());
  Vector likelihood(na);
  for (int t = 0; t < data.size(); ++t) {
    for (int a = 0; a < na; ++a) {
      const Matrix& p = env.embedding_probs(a);
      double prob = 1.0;
      for (int k = 0; k < observed; ++k) prob *= p(k, codes(t, k));
      likelihood[a] = prob;
    }
    const double num = pi.row(t).dot(likelihood);
    const double den = pi0.row(t).dot(likelihood);
    if (!(den > 0.0)) {
      throw DegenerateInputError(
          "logging policy gives zero probability to the embedding of sample " +
          std::to_string(t));
    }
    w[t] = num / den;
  }
  return WeightedMean(data, w);
}

EstimatorResult learned_mips(const LoggedDataset& data,
                             const PolicyMatrix& target,
                             const RewardModel& model,
                             const MipsConfig& mips_config,
                             const CategoricalEmbeddingTable* table) {
  return mips(data, target, sample_embeddings(model, data, table),
              mips_config);
}

EstimatorResult learned_mips(const LoggedDataset& data,
                             const PolicyMatrix& target, InputRepr repr,
                             const TrainConfig& train_config,
                             const MipsConfig& mips_config,
                             const CategoricalEmbeddingTable* table) {
  const RewardModel model = train_reward_model(data, repr, train_config, table);
  return learned_mips(data, target, model, mips_config, table);
}

}  // namespace embope

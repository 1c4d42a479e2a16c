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

#include "embope/kernel_view.h"

#include <cmath>
#include <string>

#include "embope/errors.h"

namespace embope {
namespace {

void CheckPosterior(const NonContextualLog& log, const Matrix& posterior) {
  if (posterior.rows() != log.size() || posterior.cols() != log.n_actions()) {
    throw ParameterError("posterior must be n x |A|");
  }
  if (!posterior.allFinite() || posterior.minCoeff() < 0.0) {
    throw ParameterError("posterior entries must be finite and non-negative");
  }
}

}  // namespace

void NonContextualLog::Validate() const {
  const auto n = static_cast<Eigen::Index>(actions.size());
  if (n < 1) throw ParameterError("log is empty");
  if (embeddings.rows() != n || rewards.size() != n) {
    throw ParameterError("actions, embeddings and rewards differ in length");
  }
  if (logging_probs.size() < 1 || logging_probs.minCoeff() < 0.0 ||
      std::abs(logging_probs.sum() - 1.0) > 1e-9) {
    throw ParameterError("logging distribution must be a probability vector");
  }
  for (int a : actions) {
    if (a < 0 || a >= logging_probs.size()) {
      throw ParameterError("action " + std::to_string(a) + " out of range");
    }
  }
  if (!embeddings.allFinite() || !rewards.allFinite()) {
    throw ParameterError("log contains non-finite values");
  }
}

Vector dm_equivalent_reward(const NonContextualLog& log,
                            const Matrix& posterior) {
  log.Validate();
  CheckPosterior(log, posterior);
  const Vector mass = posterior.transpose() * log.rewards;
  Vector out(log.n_actions());
  for (int a = 0; a < log.n_actions(); ++a) {
    const double p0 = log.logging_probs[a];
    if (p0 > 0.0) {
      out[a] = mass[a] / (log.size() * p0);
    } else if (posterior.col(a).maxCoeff() > 0.0) {
      throw DegenerateInputError("action " + std::to_string(a) +
                                 " has posterior mass but zero logging "
                                 "probability");
    } else {
      out[a] = 0.0;
    }
  }
  return out;
}

Vector dm_equivalent_reward(const NonContextualLog& log,
                            const LdaClassifier& classifier) {
  log.Validate();
  return dm_equivalent_reward(log, lda_posterior(classifier, log.embeddings));
}

double mips_weight_form(const NonContextualLog& log, const Matrix& posterior,
                        const Vector& target_probs) {
  log.Validate();
  CheckPosterior(log, posterior);
  if (target_probs.size() != log.n_actions()) {
    throw ParameterError("target distribution must cover every action");
  }
  double total = 0.0;
  for (int t = 0; t < log.size(); ++t) {
    double w = 0.0;
    for (int a = 0; a < log.n_actions(); ++a) {
      if (posterior(t, a) == 0.0) continue;
      if (!(log.logging_probs[a] > 0.0)) {
        throw DegenerateInputError("zero logging probability under support");
      }
      w += posterior(t, a) * target_probs[a] / log.logging_probs[a];
    }
    total += w * log.rewards[t];
  }
  return total / log.size();
}

double dm_value(const Vector& target_probs, const Vector& action_rewards) {
  if (target_probs.size() != action_rewards.size()) {
    throw ParameterError("policy and reward vectors differ in length");
  }
  return target_probs.dot(action_rewards);
}

KernelReward kernel_reward(const NonContextualLog& log,
                           const Matrix& action_embeddings, double sigma2,
                           KernelNormalization normalization) {
  log.Validate();
  if (!(sigma2 > 0.0)) throw ParameterError("sigma2 must be positive");
  if (action_embeddings.rows() != log.n_actions() ||
      action_embeddings.cols() != log.embeddings.cols()) {
    throw ParameterError("action embeddings must be |A| x d");
  }
  const int n = log.size();
  const int na = log.n_actions();
  KernelReward out;
  out.weights.resize(n, na);
  for (int t = 0; t < n; ++t) {
    for (int a = 0; a < na; ++a) {
      const double d2 =
          (log.embeddings.row(t) - action_embeddings.row(a)).squaredNorm();
      out.weights(t, a) = std::exp(-0.5 * d2 / sigma2);
    }
  }
  out.values.resize(na);
  if (normalization == KernelNormalization::kNone) {
    const Vector num = out.weights.transpose() * log.rewards;
    const Vector den = out.weights.colwise().sum().transpose();
    for (int a = 0; a < na; ++a) {
      if (!(den[a] > 0.0)) {
        throw DegenerateInputError("kernel weights of action " +
                                   std::to_string(a) + " underflow to zero");
      }
      out.values[a] = num[a] / den[a];
    }
  } else {
    const Vector z = out.weights * log.logging_probs;
    Vector scaled(n);
    for (int t = 0; t < n; ++t) {
      if (!(z[t] > 0.0)) {
        throw DegenerateInputError("marginal density of sample " +
                                   std::to_string(t) + " is zero");
      }
      scaled[t] = log.rewards[t] / z[t];
    }
    out.values = out.weights.transpose() * scaled / static_cast<double>(n);
  }
  return out;
}

}  // namespace embope

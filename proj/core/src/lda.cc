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

#include "embope/lda.h"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "embope/errors.h"

namespace embope {

LdaClassifier fit_lda(const Matrix& embeddings, std::span<const int> labels,
                      int n_classes, bool spherical) {
  const auto n = embeddings.rows();
  const auto d = embeddings.cols();
  if (n != static_cast<Eigen::Index>(labels.size())) {
    throw ParameterError("embeddings and labels must have equal length");
  }
  if (n < 1 || d < 1) throw ParameterError("LDA needs non-empty embeddings");
  if (n_classes < 1) throw ParameterError("n_classes must be positive");
  if (!embeddings.allFinite()) {
    throw ParameterError("embeddings contain non-finite values");
  }

  LdaClassifier lda;
  lda.spherical = spherical;
  lda.means = Matrix::Zero(n_classes, d);
  std::vector<double> counts(static_cast<size_t>(n_classes), 0.0);
  for (Eigen::Index t = 0; t < n; ++t) {
    const int a = labels[t];
    if (a < 0 || a >= n_classes) {
      throw ParameterError("label " + std::to_string(a) + " out of range");
    }
    lda.means.row(a) += embeddings.row(t);
    counts[a] += 1.0;
  }
  lda.priors = Vector::Zero(n_classes);
  int present = 0;
  for (int a = 0; a < n_classes; ++a) {
    if (counts[a] > 0.0) {
      lda.means.row(a) /= counts[a];
      lda.priors[a] = counts[a] / static_cast<double>(n);
      ++present;
    }
  }

  if (spherical) {
    double ss = 0.0;
    for (Eigen::Index t = 0; t < n; ++t) {
      ss += (embeddings.row(t) - lda.means.row(labels[t])).squaredNorm();
    }
    lda.sigma2 = ss / static_cast<double>(n * d);
    if (!(lda.sigma2 > 0.0)) {
      throw ParameterError(
          "spherical variance is zero: every sample sits on its class mean");
    }
  } else {
    for (int a = 0; a < n_classes; ++a) {
      if (counts[a] == 1.0) {
        throw ParameterError("class " + std::to_string(a) +
                             " has a single sample; pooled covariance needs two");
      }
    }
    Matrix centered(n, d);
    for (Eigen::Index t = 0; t < n; ++t) {
      centered.row(t) = embeddings.row(t) - lda.means.row(labels[t]);
    }
    lda.covariance = centered.transpose() * centered /
                     static_cast<double>(n - present);
    Eigen::LLT<Matrix> llt(lda.covariance);
    if (llt.info() != Eigen::Success) {
      throw ParameterError("pooled covariance is not positive definite");
    }
  }
  return lda;
}

LdaClassifier WithPriors(LdaClassifier classifier, const Vector& priors) {
  if (priors.size() != classifier.n_classes()) {
    throw ParameterError("one prior per class required");
  }
  if (priors.minCoeff() < 0.0 || std::abs(priors.sum() - 1.0) > 1e-9) {
    throw ParameterError("priors must be a probability vector");
  }
  classifier.priors = priors;
  return classifier;
}

Matrix lda_posterior(const LdaClassifier& lda, const Matrix& embeddings) {
  if (embeddings.cols() != lda.dim()) {
    throw ParameterError("embedding dimension does not match the classifier");
  }
  const auto k = lda.n_classes();
  Matrix log_post(embeddings.rows(), k);
  const double neg_inf = -std::numeric_limits<double>::infinity();
  Matrix precision;
  if (!lda.spherical) {
    precision = lda.covariance.llt().solve(Matrix::Identity(lda.dim(), lda.dim()));
  }
  for (Eigen::Index t = 0; t < embeddings.rows(); ++t) {
    for (Eigen::Index a = 0; a < k; ++a) {
      if (lda.priors[a] <= 0.0) {
        log_post(t, a) = neg_inf;
        continue;
      }
      const Vector diff = (embeddings.row(t) - lda.means.row(a)).transpose();
      const double quad = lda.spherical ? diff.squaredNorm() / lda.sigma2
                                        : diff.dot(precision * diff);
      log_post(t, a) = std::log(lda.priors[a]) - 0.5 * quad;
    }
    auto row = log_post.row(t);
    const double shift = row.maxCoeff();
    row = (row.array() - shift).exp();
    row /= row.sum();
  }
  return log_post;
}

Vector lda_posterior(const LdaClassifier& lda, const Vector& embedding) {
  return lda_posterior(lda, Matrix(embedding.transpose())).row(0).transpose();
}

}  // namespace embope

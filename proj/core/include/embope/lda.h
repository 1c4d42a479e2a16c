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

#ifndef EMBOPE_LDA_H_
#define EMBOPE_LDA_H_

#include <span>

#include "embope/types.h"

namespace embope {

// Gaussian class-conditional model with a shared covariance: either sigma^2 I
// (spherical) or a pooled full matrix.
struct LdaClassifier {
  Matrix means;   // n_classes x d; rows of absent classes are zero
  Vector priors;  // sums to 1; absent classes have prior 0
  bool spherical = true;
  double sigma2 = 1.0;  // spherical variance
  Matrix covariance;    // pooled covariance when !spherical

  int n_classes() const { return static_cast<int>(means.rows()); }
  int dim() const { return static_cast<int>(means.cols()); }
};

// Class means are per-class sample means and priors empirical frequencies.
// Spherical: sigma^2 is the pooled mean squared deviation over all
// coordinates, sum ||e_t - mean(a_t)||^2 / (n d). Full: pooled covariance with
// n - K degrees of freedom; every present class needs two samples.
LdaClassifier fit_lda(const Matrix& embeddings, std::span<const int> labels,
                      int n_classes, bool spherical = true);

// Copy with the priors replaced (e.g. by the known logging distribution).
LdaClassifier WithPriors(LdaClassifier classifier, const Vector& priors);

// p(a | e) proportional to N(e; mean_a, Sigma) * prior_a.
Vector lda_posterior(const LdaClassifier& classifier, const Vector& embedding);
// Row t is the posterior of embeddings.row(t).
Matrix lda_posterior(const LdaClassifier& classifier, const Matrix& embeddings);

}  // namespace embope

#endif  // EMBOPE_LDA_H_

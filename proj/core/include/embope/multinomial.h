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

#ifndef EMBOPE_MULTINOMIAL_H_
#define EMBOPE_MULTINOMIAL_H_

#include <span>
#include <vector>

#include "embope/types.h"

namespace embope {

struct MultinomialOptions {
  // Penalty (l2 / 2) * ||W||_F^2 added to the mean cross-entropy. Intercepts
  // are not penalized.
  double l2 = 1e-6;
  int max_iters = 100;
  // L-BFGS memory. 0 degrades to steepest descent with the same line search.
  int history = 10;
  // Stop when the max-norm of the gradient falls below this.
  double gradient_tolerance = 1e-6;
  // Or when the relative loss decrease of an accepted step falls below this.
  double relative_tolerance = 1e-12;
};

struct MultinomialFitInfo {
  int iterations = 0;
  double final_loss = 0.0;
  bool converged = false;
  // Objective before the first step and after every accepted step.
  std::vector<double> loss_history;
};

// Softmax classifier p(k | f) = softmax(W f + b)_k.
struct MultinomialClassifier {
  Matrix weights;     // n_classes x n_features
  Vector intercepts;  // n_classes
  double l2 = 0.0;
  MultinomialFitInfo info;

  int n_classes() const { return static_cast<int>(weights.rows()); }
  int n_features() const { return static_cast<int>(weights.cols()); }
};

// Minimizes L2-regularized multinomial cross-entropy by full-batch L-BFGS with
// Armijo backtracking from all-zero parameters. Identical feature rows are
// merged before optimization, which leaves the objective unchanged. Classes
// without samples stay in the model.
MultinomialClassifier fit_multinomial(const Matrix& features,
                                      std::span<const int> labels,
                                      int n_classes,
                                      const MultinomialOptions& options = {});

// m x n_classes row-stochastic matrix.
Matrix predict_proba(const MultinomialClassifier& classifier,
                     const Matrix& features);

// Objective and gradient at (weights, intercepts) on raw (unmerged) data.
// Exposed for derivative checks.
double multinomial_objective(const Matrix& features,
                             std::span<const int> labels, double l2,
                             const Matrix& weights, const Vector& intercepts,
                             Matrix* weights_grad, Vector* intercepts_grad);

}  // namespace embope

#endif  // EMBOPE_MULTINOMIAL_H_

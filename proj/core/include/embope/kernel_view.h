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

#ifndef EMBOPE_KERNEL_VIEW_H_
#define EMBOPE_KERNEL_VIEW_H_

// Non-contextual view of marginalized IPS as a direct method. With a
// posterior p(a | e) over actions,
//
//   (1/n) sum_t [sum_a p(a | e_t) pi(a) / pi_0(a)] r_t = sum_a pi(a) r~(a),
//   r~(a) = (1/n) sum_t p(a | e_t) / pi_0(a) r_t,
//
// and under a Gaussian class model r~ is a kernel regression of the rewards
// in embedding space.

#include <vector>

#include "embope/lda.h"
#include "embope/types.h"

namespace embope {

struct NonContextualLog {
  std::vector<int> actions;
  Matrix embeddings;     // n x d
  Vector rewards;        // n
  Vector logging_probs;  // |A|, pi_0

  int size() const { return static_cast<int>(actions.size()); }
  int n_actions() const { return static_cast<int>(logging_probs.size()); }
  // Throws ParameterError on mismatched lengths, out-of-range actions or a
  // non-stochastic pi_0.
  void Validate() const;
};

// `posterior` is n x |A| with row t equal to p(. | e_t). Throws
// DegenerateInputError when pi_0(a) = 0 for an action with posterior mass.
Vector dm_equivalent_reward(const NonContextualLog& log,
                            const Matrix& posterior);
Vector dm_equivalent_reward(const NonContextualLog& log,
                            const LdaClassifier& classifier);

// The weight form (1/n) sum_t [sum_a p(a | e_t) pi(a) / pi_0(a)] r_t.
double mips_weight_form(const NonContextualLog& log, const Matrix& posterior,
                        const Vector& target_probs);

// sum_a pi(a) r(a).
double dm_value(const Vector& target_probs, const Vector& action_rewards);

enum class KernelNormalization {
  // Nadaraya-Watson average per action: sum_t K_ta r_t / sum_t K_ta.
  kNone,
  // (1/n) sum_t K_ta r_t / Z_t with Z_t = sum_b pi_0(b) K_tb, the exact
  // r~(a) of an LDA posterior with means f, variance sigma2 and priors pi_0.
  kMarginalDensity,
};

struct KernelReward {
  Vector values;   // |A|
  Matrix weights;  // n x |A|, K_ta = exp(-||e_t - f(a)||^2 / (2 sigma2))
};

KernelReward kernel_reward(
    const NonContextualLog& log, const Matrix& action_embeddings,
    double sigma2,
    KernelNormalization normalization = KernelNormalization::kNone);

}  // namespace embope

#endif  // EMBOPE_KERNEL_VIEW_H_

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

#ifndef EMBOPE_TESTS_SUPPORT_FIXTURES_H_
#define EMBOPE_TESTS_SUPPORT_FIXTURES_H_

#include <cstdint>
#include <string>

#include "embope/bandit.h"
#include "embope/kernel_view.h"
#include "embope/rng.h"
#include "embope/types.h"

namespace embope::testing {

// Row-stochastic n x |A| matrix from a softmax of standard normal scores.
PolicyMatrix RandomPolicy(int rows, int n_actions, RngStream& rng,
                          double temperature = 1.0);

struct RandomLogOptions {
  int n = 200;
  int n_actions = 5;
  int context_dim = 3;
  int embedding_dims = 2;  // 0 for no embeddings
  int cardinality = 3;
  bool with_logging_policy = true;
};

// Contexts N(0, I), a softmax logging policy, actions drawn from it, rewards
// N(action index / |A|, 1) and per-action fixed categorical codes.
LoggedDataset RandomLog(const RandomLogOptions& options, std::uint64_t seed);

// Per-action codes used by RandomLog for the same seed.
CategoricalEmbeddingTable RandomLogTable(const RandomLogOptions& options,
                                         std::uint64_t seed);

// Non-contextual log with Gaussian embeddings around per-action centers.
NonContextualLog RandomNonContextualLog(int n, int n_actions, int dim,
                                        std::uint64_t seed);

// Fresh directory under the system temp path.
std::string TempDir(const std::string& name);

}  // namespace embope::testing

#endif  // EMBOPE_TESTS_SUPPORT_FIXTURES_H_

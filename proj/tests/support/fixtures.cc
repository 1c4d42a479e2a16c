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

#include "fixtures.h"

#include <filesystem>

#include "embope/sampling.h"

namespace embope::testing {

PolicyMatrix RandomPolicy(int rows, int n_actions, RngStream& rng,
                          double temperature) {
  return softmax_policy(SampleStandardNormal(rng, rows, n_actions),
                        1.0 / temperature);
}

CategoricalEmbeddingTable RandomLogTable(const RandomLogOptions& o,
                                         std::uint64_t seed) {
  RngStream rng = SeededRng(seed).Stream("codes");
  CodeMatrix codes(o.n_actions, o.embedding_dims);
  for (int a = 0; a < o.n_actions; ++a)
    for (int k = 0; k < o.embedding_dims; ++k)
      codes(a, k) = static_cast<int>(rng.NextUniform() * o.cardinality);
  return CategoricalEmbeddingTable(codes, o.cardinality);
}

LoggedDataset RandomLog(const RandomLogOptions& o, std::uint64_t seed) {
  const SeededRng seeds(seed);
  RngStream rng = seeds.Stream("log");
  Matrix x = SampleStandardNormal(rng, o.n, o.context_dim);
  PolicyMatrix logging = RandomPolicy(o.n, o.n_actions, rng);
  std::vector<int> actions(static_cast<size_t>(o.n));
  Vector rewards(o.n), pscores(o.n);
  for (int t = 0; t < o.n; ++t) {
    const Vector row = logging.probs().row(t).transpose();
    actions[t] = SampleCategorical(rng, row);
    pscores[t] = row[actions[t]];
    rewards[t] = static_cast<double>(actions[t]) / o.n_actions +
                 SampleStandardNormal(rng, 1, 1)(0, 0);
  }
  std::optional<CodeMatrix> codes;
  std::optional<std::vector<int>> cards;
  if (o.embedding_dims > 0) {
    const CategoricalEmbeddingTable table = RandomLogTable(o, seed);
    codes = table.ForActions(actions);
    cards = table.cardinalities();
  }
  std::optional<PolicyMatrix> policy;
  if (o.with_logging_policy) policy = logging;
  return LoggedDataset(std::move(x), std::move(actions), std::move(rewards),
                       std::move(pscores), o.n_actions, std::move(codes),
                       std::move(cards), std::move(policy));
}

NonContextualLog RandomNonContextualLog(int n, int n_actions, int dim,
                                        std::uint64_t seed) {
  RngStream rng(seed);
  NonContextualLog log;
  const Matrix centers = 2.0 * SampleStandardNormal(rng, n_actions, dim);
  Vector nu = SampleExponential(rng, 1.0, n_actions, 1).col(0);
  nu.array() += 0.05;
  log.logging_probs = nu / nu.sum();
  log.actions.resize(static_cast<size_t>(n));
  log.embeddings.resize(n, dim);
  log.rewards.resize(n);
  for (int t = 0; t < n; ++t) {
    const int a = SampleCategorical(rng, log.logging_probs);
    log.actions[t] = a;
    log.embeddings.row(t) =
        centers.row(a) + SampleStandardNormal(rng, 1, dim).row(0);
    log.rewards[t] = SampleUniform(rng, 0.0, 1.0, 1, 1)(0, 0);
  }
  return log;
}

std::string TempDir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("embope_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

}  // namespace embope::testing

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

#ifndef EMBOPE_BENCH_CSV_IO_H_
#define EMBOPE_BENCH_CSV_IO_H_

// Logged-data CSV files. Header row, then one sample per row:
//
//   x_0,...,x_{d-1},action,reward,pscore[,emb_0,...,emb_{k-1}]
//
// Floats are written in shortest round-trip form.

#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "embope/bandit.h"
#include "embope/rng.h"
#include "embope/types.h"

namespace embope {

struct CsvSchemaOptions {
  // Declared |A|; defaults to the largest logged action + 1.
  std::optional<int> n_actions;
  // Per-dimension category counts; default to the largest code + 1.
  std::optional<std::vector<int>> cardinalities;
};

struct LoadedLog {
  LoggedDataset data;
  // Present when embedding columns exist, every action is logged and each
  // action always carries the same codes.
  std::optional<CategoricalEmbeddingTable> table;
};

// Throws LoadError naming the 1-based data row and the column on any
// validation failure, IoError when the file cannot be read.
LoadedLog load_logged_csv(const std::string& path,
                          const CsvSchemaOptions& options = {});
LoadedLog parse_logged_csv(std::istream& in,
                           const CsvSchemaOptions& options = {});

// Throws IoError when the path is not writable.
void write_logged_csv(const std::string& path, const LoggedDataset& data);

// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

// Context-free logging distribution implied by the pscore column: per-action
// propensities when every action is logged with a constant pscore summing to
// one, the uniform distribution when every pscore equals 1/|A|, otherwise
// nothing.
std::optional<Vector> infer_context_free_logging(const LoggedDataset& data);

// `size` rows drawn uniformly with replacement.
LoggedDataset bootstrap_sample(const LoggedDataset& data, int size,
                               RngStream& rng);

// Context-free target distribution file: header `action,prob`, one row per
// action.
Vector load_action_distribution_csv(const std::string& path, int n_actions);
void write_action_distribution_csv(const std::string& path,
                                   const Vector& probs);

}  // namespace embope

#endif  // EMBOPE_BENCH_CSV_IO_H_

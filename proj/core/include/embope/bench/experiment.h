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

#ifndef EMBOPE_BENCH_EXPERIMENT_H_
#define EMBOPE_BENCH_EXPERIMENT_H_

// Seeded experiment grids. Every (cell, run) pair draws from its own random
// streams, so results do not depend on the worker count or the order in
// which runs finish.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "embope/estimators.h"
#include "embope/reward_model.h"
#include "embope/synth.h"
#include "embope/toy.h"

namespace embope {

enum class ExperimentKind {
  kToy,
  kSynthGrid,
  kHiddenDims,
  kEmbedSize,
  kRealProtocol,
};

// "toy", "synth", "hidden-dims", "embed-size", "real".
const char* ExperimentKindName(ExperimentKind kind);
// Throws ParameterError on an unknown name.
ExperimentKind ParseExperimentKind(const std::string& name);

struct RealProtocolOptions {
  std::string data_path;    // logged-data CSV
  std::string target_path;  // action,prob CSV
  // Policy value of the target; read from truth_path when unset.
  std::optional<double> true_value;
  std::string truth_path;   // JSON with a "policy_value" number
  int bootstrap_size = 10000;
  std::optional<int> n_actions;
};

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::kSynthGrid;
  std::vector<int> action_counts{10};
  std::vector<int> sample_sizes{20000};
  std::vector<int> embedding_dims{3};
  std::vector<int> hidden_dims{0};
  // Learned embedding widths; 0 means full rank (d_X).
  std::vector<int> embedding_sizes{0};
  // Empty selects DefaultEstimators(kind).
  std::vector<std::string> estimators;
  int runs = 10;
  std::uint64_t seed = 12345;

  // Environment and model settings. The grid axes override the matching
  // fields (n_actions, embedding_dims, hidden_dims, embedding_size).
  SynthConfig synth;
  ToyConfig toy;
  TrainConfig train;
  MipsConfig mips;

  // Appends a constant feature to the contexts the reward model sees, giving
  // it a per-action intercept. The data-generating process is unchanged.
  // Unset: on for the toy protocol (a linear regression per action), off
  // elsewhere (plain dot product of embedding and context).
  std::optional<bool> intercept_context;

  bool UsesInterceptContext() const {
    return intercept_context.value_or(kind == ExperimentKind::kToy);
  }

  // Fresh contexts used to integrate the synthetic ground truth.
  int truth_contexts = 100000;
  // Toy protocol: runs = reward functions x datasets per function.
  int toy_datasets_per_function = 15;

  RealProtocolOptions real;

  // 0 reads EMBOPE_WORKERS, falling back to the hardware concurrency.
  int workers = 0;

  // Directory receiving the output files; run_experiment does not write.
  std::string output_dir = "results";

  // Throws ParameterError on empty axes, runs < 1 or unknown estimators.
  void Validate() const;
};

std::vector<std::string> DefaultEstimators(ExperimentKind kind);

// Accepts the names below; "switch_dr" expands to taus 5, 10, 50 and 100 and
// "learned_mips" is an alias of "learned_mips_onehot".
//   ips snips dm dr switch_dr_tau<T> mips mips_true mips_slope
//   learned_mips_onehot learned_mips_finetune learned_mips_combined
std::vector<std::string> ExpandEstimatorNames(
    const std::vector<std::string>& names);

struct CellCoordinates {
  int n_actions = 0;
  int n_samples = 0;
  int embedding_dims = 0;
  int hidden_dims = 0;
  int embedding_size = 0;

  auto operator<=>(const CellCoordinates&) const = default;
};

struct RunRecord {
  std::string experiment;
  CellCoordinates cell;
  int run = 0;
  std::uint64_t seed = 0;
  std::string estimator;
  double estimate = 0.0;
  double true_value = 0.0;
  double squared_error = 0.0;
  bool ok = true;
  std::string error;  // empty when ok
};

struct AggregateRecord {
  std::string experiment;
  CellCoordinates cell;
  std::string estimator;
  double mse_mean = 0.0;
  // Sample standard deviation (n - 1 divisor) over sqrt(runs); 0 with fewer
  // than two successful runs.
  double mse_stderr = 0.0;
  int runs = 0;    // successful runs
  int failed = 0;  // runs excluded because the estimator failed
};

struct ExperimentResult {
  std::string experiment;
  std::vector<std::string> estimators;  // expanded, in requested order
  std::vector<RunRecord> runs;          // sorted by (cell, run, estimator)
  std::vector<AggregateRecord> aggregates;
};

ExperimentResult run_experiment(const ExperimentSpec& spec);

// Groups by (cell, estimator) in the order given by `estimator_order`;
// failed records only increase the failure count.
std::vector<AggregateRecord> aggregate(
    const std::vector<RunRecord>& runs,
    const std::vector<std::string>& estimator_order);

// Applies a JSON config object on top of `spec`. Keys mirror the CLI flags:
// actions, samples, emb_dims, hide_dims, emb_sizes, estimators, runs, seed,
// out, plus nested "synth", "toy", "train", "mips", "real" objects and the
// scalars workers, truth_contexts, toy_datasets_per_function, intercept. Throws
// ParameterError on unknown keys or wrong types.
void apply_json_config(const std::string& json_text, ExperimentSpec& spec);

// Synthetic stand-in shaped like the real data: |A| = 240, d_X = 10, four
// categorical embedding dimensions of cardinalities {24, 10, 6, 4}, binary
// rewards, uniform logging. Writes logged.csv, target.csv and truth.json into
// `dir` and returns the paths in a RealProtocolOptions.
RealProtocolOptions make_real_standin(const std::string& dir, int n_rows,
                                      std::uint64_t seed);

// Worker count used when ExperimentSpec::workers is 0.
int default_worker_count();

}  // namespace embope

#endif  // EMBOPE_BENCH_EXPERIMENT_H_

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

#ifndef EMBOPE_BENCH_OUTPUTS_H_
#define EMBOPE_BENCH_OUTPUTS_H_

// Result files. Every writer is deterministic: identical inputs give
// byte-identical files.
//
//   runs.csv        experiment,n_actions,n_samples,d_e,hidden_dims,emb_size,
//                   run,seed,estimator,estimate,true_value,squared_error,
//                   status,error
//   aggregates.csv  experiment,n_actions,n_samples,d_e,hidden_dims,emb_size,
//                   estimator,mse_mean,mse_stderr,runs,failed
//   aggregates.json the same rows as an array of objects
//   plot_data.csv   x,y,series
//   cdf.csv         experiment,n_actions,n_samples,d_e,hidden_dims,emb_size,
//                   estimator,x,cdf  (step vertices, see cdf_step_points)
//   cdf_summary.csv experiment,n_actions,n_samples,d_e,hidden_dims,emb_size,
//                   estimator,samples,excluded,cdf_at_1

#include <string>
#include <vector>

#include "embope/bench/experiment.h"
#include "embope/bench/relative_cdf.h"

namespace embope {

// All writers throw IoError when the path cannot be written.
void write_runs_csv(const std::string& path, const std::vector<RunRecord>& runs);
void write_aggregates_csv(const std::string& path,
                          const std::vector<AggregateRecord>& aggregates);
void write_aggregates_json(const std::string& path,
                           const std::vector<AggregateRecord>& aggregates);
void write_cdf_csv(const std::string& path,
                   const std::vector<RelativeCdf>& cdfs);
void write_cdf_summary_csv(const std::string& path,
                           const std::vector<RelativeCdf>& cdfs);

// (x, y, series) triples. x is the first varying axis among n_actions,
// n_samples, d_e, hidden_dims and emb_size (emb_size 0 stands for full rank),
// y the mean squared error, or the ratio to the ips MSE of the same cell for
// the embed-size experiment. Other varying axes are appended to the series
// name.
// With CDFs the step vertices are written instead, one series per estimator.
void write_plot_data_csv(const std::string& path, const ExperimentResult& result,
                         const std::vector<RelativeCdf>& cdfs = {});

// Reads a runs.csv back. Throws LoadError on malformed rows.
std::vector<RunRecord> read_runs_csv(const std::string& path);

// Writes runs.csv, aggregates.csv, aggregates.json and plot_data.csv into
// `dir` (created if missing), plus cdf.csv and cdf_summary.csv when `cdfs`
// is non-empty.
void emit_outputs(const std::string& dir, const ExperimentResult& result,
                  const std::vector<RelativeCdf>& cdfs = {});

}  // namespace embope

#endif  // EMBOPE_BENCH_OUTPUTS_H_

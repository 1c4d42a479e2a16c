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

#ifndef EMBOPE_BENCH_RELATIVE_CDF_H_
#define EMBOPE_BENCH_RELATIVE_CDF_H_

#include <string>
#include <vector>

#include "embope/bench/experiment.h"

namespace embope {

// Empirical distribution of squared error relative to a reference estimator,
// one value per run (bootstrap sample).
struct RelativeCdf {
  std::string experiment;
  CellCoordinates cell;
  std::string estimator;
  std::vector<double> sorted;  // ascending relative squared errors
  std::vector<double> grid;    // distinct values of `sorted`
  std::vector<double> values;  // F(grid[i]) = #{rel <= grid[i]} / m
  int excluded = 0;            // runs where the estimator failed
};

// One RelativeCdf per (cell, estimator other than `reference`), in
// `estimator_order` within each cell. Throws DegenerateInputError when the
// reference is missing, failed or has zero squared error in some run.
std::vector<RelativeCdf> relative_mse_cdf(
    const std::vector<RunRecord>& runs,
    const std::vector<std::string>& estimator_order,
    const std::string& reference = "ips");

// #{rel <= x} / m; the fraction of runs in which the estimator is at least as
// accurate as the reference when x = 1.
double cdf_at(const RelativeCdf& cdf, double x);

// Step-function vertices: for each grid value v, (v^-, F(v^-)) then (v, F(v)),
// with v^- the next double below v.
std::vector<std::pair<double, double>> cdf_step_points(const RelativeCdf& cdf);

}  // namespace embope

#endif  // EMBOPE_BENCH_RELATIVE_CDF_H_

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

#include "embope/bench/relative_cdf.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

#include "embope/errors.h"

namespace embope {

std::vector<RelativeCdf> relative_mse_cdf(
    const std::vector<RunRecord>& runs,
    const std::vector<std::string>& estimator_order,
    const std::string& reference) {
  using CellKey = std::tuple<std::string, CellCoordinates>;
  std::map<std::tuple<std::string, CellCoordinates, int>, const RunRecord*>
      refs;
  for (const RunRecord& r : runs) {
    if (r.estimator != reference) continue;
    if (!r.ok || !(r.squared_error > 0.0)) {
      throw DegenerateInputError("reference estimator " + reference +
                                 " has zero or missing error in run " +
                                 std::to_string(r.run));
    }
    refs[{r.experiment, r.cell, r.run}] = &r;
  }

  std::map<CellKey, std::map<std::string, RelativeCdf>> by_cell;
  for (const RunRecord& r : runs) {
    if (r.estimator == reference) continue;
    auto ref = refs.find({r.experiment, r.cell, r.run});
    if (ref == refs.end()) {
      throw DegenerateInputError("run " + std::to_string(r.run) +
                                 " has no " + reference + " record");
    }
    RelativeCdf& cdf = by_cell[{r.experiment, r.cell}][r.estimator];
    cdf.experiment = r.experiment;
    cdf.cell = r.cell;
    cdf.estimator = r.estimator;
    if (!r.ok) {
      ++cdf.excluded;
      continue;
    }
    cdf.sorted.push_back(r.squared_error / ref->second->squared_error);
  }

  std::vector<RelativeCdf> out;
  for (auto& [cell, per_estimator] : by_cell) {
    std::vector<std::string> order = estimator_order;
    for (const auto& [name, cdf] : per_estimator) {
      if (std::find(order.begin(), order.end(), name) == order.end()) {
        order.push_back(name);
      }
    }
    for (const std::string& name : order) {
      auto it = per_estimator.find(name);
      if (it == per_estimator.end()) continue;
      RelativeCdf cdf = std::move(it->second);
      std::sort(cdf.sorted.begin(), cdf.sorted.end());
      const double m = static_cast<double>(cdf.sorted.size());
      for (size_t i = 0; i < cdf.sorted.size(); ++i) {
        if (i + 1 < cdf.sorted.size() && cdf.sorted[i + 1] == cdf.sorted[i]) {
          continue;
        }
        cdf.grid.push_back(cdf.sorted[i]);
        cdf.values.push_back(static_cast<double>(i + 1) / m);
      }
      out.push_back(std::move(cdf));
    }
  }
  return out;
}

double cdf_at(const RelativeCdf& cdf, double x) {
  if (cdf.sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
  const auto count =
      std::upper_bound(cdf.sorted.begin(), cdf.sorted.end(), x) -
      cdf.sorted.begin();
  return static_cast<double>(count) / static_cast<double>(cdf.sorted.size());
}

std::vector<std::pair<double, double>> cdf_step_points(const RelativeCdf& cdf) {
  std::vector<std::pair<double, double>> out;
  double previous = 0.0;
  for (size_t i = 0; i < cdf.grid.size(); ++i) {
    const double v = cdf.grid[i];
    out.emplace_back(std::nextafter(v, -std::numeric_limits<double>::infinity()),
                     previous);
    out.emplace_back(v, cdf.values[i]);
    previous = cdf.values[i];
  }
  return out;
}

}  // namespace embope

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

#include <cmath>
#include <vector>

#include "embope/errors.h"
#include "embope/estimators.h"

namespace embope {
namespace {

struct SubsetFit {
  double estimate = 0.0;
  double stderr_ = 0.0;
};

SubsetFit FitSubset(const LoggedDataset& data, const PolicyMatrix& target,
                    const CodeMatrix& codes,
                    const std::vector<int>& cardinalities,
                    const std::vector<int>& dims, const MipsConfig& config) {
  CodeMatrix sub(codes.rows(), static_cast<Eigen::Index>(dims.size()));
  std::vector<int> card;
  for (size_t j = 0; j < dims.size(); ++j) {
    sub.col(j) = codes.col(dims[j]);
    card.push_back(cardinalities[dims[j]]);
  }
  const Vector w =
      mips_weights(data, target, one_hot_codes(sub, card), config);
  const Vector terms = w.cwiseProduct(data.rewards());
  const double n = static_cast<double>(data.size());
  SubsetFit fit;
  fit.estimate = terms.mean();
  if (data.size() > 1) {
    const double var = (terms.array() - fit.estimate).square().sum() / (n - 1.0);
    fit.stderr_ = std::sqrt(var / n);
  }
  return fit;
}

}  // namespace

std::pair<EstimatorResult, SlopeSelection> mips_slope(
    const LoggedDataset& data, const PolicyMatrix& target,
    const CodeMatrix& codes, const std::vector<int>& cardinalities,
    const MipsConfig& config) {
  const int dims = static_cast<int>(codes.cols());
  if (dims < 1) throw ParameterError("SLOPE needs at least one dimension");
  if (codes.rows() != data.size()) {
    throw ParameterError("need one code row per logged sample");
  }
  if (static_cast<int>(cardinalities.size()) != dims) {
    throw ParameterError("one cardinality per embedding dimension required");
  }

  SlopeSelection sel;
  std::vector<int> current(static_cast<size_t>(dims));
  for (int k = 0; k < dims; ++k) current[k] = k;
  SubsetFit fit = FitSubset(data, target, codes, cardinalities, current, config);
  sel.subsets.push_back(current);
  sel.estimates.push_back(fit.estimate);
  sel.half_widths.push_back(2.0 * fit.stderr_);

  while (current.size() > 1) {
    // Candidate with the smallest standard error; ties keep the earliest
    // dropped position.
    int best_drop = -1;
    SubsetFit best;
    std::vector<int> best_subset;
    for (size_t j = 0; j < current.size(); ++j) {
      std::vector<int> candidate;
      for (size_t i = 0; i < current.size(); ++i) {
        if (i != j) candidate.push_back(current[i]);
      }
      const SubsetFit f =
          FitSubset(data, target, codes, cardinalities, candidate, config);
      if (best_drop < 0 || f.stderr_ < best.stderr_) {
        best_drop = static_cast<int>(j);
        best = f;
        best_subset = std::move(candidate);
      }
    }
    sel.subsets.push_back(best_subset);
    sel.estimates.push_back(best.estimate);
    sel.half_widths.push_back(2.0 * best.stderr_);

    const double hw = 2.0 * best.stderr_;
    bool intersects_all = true;
    for (int i = 0; i <= sel.chosen_index; ++i) {
      if (std::abs(best.estimate - sel.estimates[i]) > hw + sel.half_widths[i]) {
        intersects_all = false;
        break;
      }
    }
    if (!intersects_all) break;
    sel.chosen_index = static_cast<int>(sel.subsets.size()) - 1;
    current = std::move(best_subset);
  }

  EstimatorResult result;
  result.estimate = sel.estimates[sel.chosen_index];
  result.diagnostics["selected_dims"] =
      static_cast<double>(sel.chosen().size());
  result.diagnostics["half_width"] = sel.half_widths[sel.chosen_index];
  if (!std::isfinite(result.estimate)) {
    throw DegenerateInputError("estimate is not finite");
  }
  return {std::move(result), std::move(sel)};
}

std::pair<EstimatorResult, SlopeSelection> mips_slope(
    const LoggedDataset& data, const PolicyMatrix& target,
    const CategoricalEmbeddingTable& table, const MipsConfig& config) {
  if (table.n_actions() != data.n_actions()) {
    throw ParameterError("embedding table must cover every action");
  }
  return mips_slope(data, target, table.ForActions(data.actions()),
                    table.cardinalities(), config);
}

}  // namespace embope

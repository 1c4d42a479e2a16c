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

#include "embope/sampling.h"

#include <cmath>
#include <random>

#include "embope/errors.h"

namespace embope {

Matrix SampleStandardNormal(RngStream& rng, int rows, int cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix out(rows, cols);
  // Row-major fill order so that prefixes of rows are stable across widths.
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) out(i, j) = normal(rng.engine());
  return out;
}

Matrix SampleExponential(RngStream& rng, double rate, int rows, int cols) {
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw ParameterError("exponential rate must be positive and finite");
  }
  std::exponential_distribution<double> expo(rate);
  Matrix out(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) out(i, j) = expo(rng.engine());
  return out;
}

Matrix SampleUniform(RngStream& rng, double lo, double hi, int rows, int cols) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw ParameterError("uniform bounds must be finite with lo < hi");
  }
  Matrix out(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      out(i, j) = lo + (hi - lo) * rng.NextUniform();
  return out;
}

Vector SampleDirichlet(RngStream& rng, const Vector& alpha) {
  if (alpha.size() == 0) throw ParameterError("dirichlet needs a non-empty alpha");
  Vector out(alpha.size());
  for (Eigen::Index k = 0; k < alpha.size(); ++k) {
    if (!(alpha[k] > 0.0) || !std::isfinite(alpha[k])) {
      throw ParameterError("dirichlet concentration must be positive");
    }
    std::gamma_distribution<double> gamma(alpha[k], 1.0);
    out[k] = gamma(rng.engine());
  }
  double total = out.sum();
  if (!(total > 0.0)) {
    // Every gamma draw underflowed (tiny concentrations); the limiting
    // distribution puts all mass on the largest concentration.
    Eigen::Index best = 0;
    alpha.maxCoeff(&best);
    out.setZero();
    out[best] = 1.0;
    return out;
  }
  return out / total;
}

int SampleCategoricalUnchecked(RngStream& rng, const double* probs, int size,
                               Eigen::Index stride) {
  const double u = rng.NextUniform();
  double cumulative = 0.0;
  int last_positive = 0;
  for (int i = 0; i < size; ++i) {
    const double p = probs[i * stride];
    if (p > 0.0) last_positive = i;
    cumulative += p;
    if (u < cumulative) return i;
  }
  return last_positive;
}

int SampleCategorical(RngStream& rng, std::span<const double> probs) {
  if (probs.empty()) throw ParameterError("categorical needs probabilities");
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw ParameterError("categorical probabilities must be non-negative");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ParameterError("categorical probabilities must sum to 1");
  }
  return SampleCategoricalUnchecked(rng, probs.data(),
                                    static_cast<int>(probs.size()));
}

int SampleCategorical(RngStream& rng, const Eigen::Ref<const Vector>& probs) {
  const Vector copy = probs;
  return SampleCategorical(
      rng, std::span<const double>(copy.data(), static_cast<size_t>(copy.size())));
}

}  // namespace embope

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

#ifndef EMBOPE_SAMPLING_H_
#define EMBOPE_SAMPLING_H_

#include <span>

#include "embope/rng.h"
#include "embope/types.h"

namespace embope {

Matrix SampleStandardNormal(RngStream& rng, int rows, int cols);
Matrix SampleExponential(RngStream& rng, double rate, int rows, int cols);
Matrix SampleUniform(RngStream& rng, double lo, double hi, int rows, int cols);
Vector SampleDirichlet(RngStream& rng, const Vector& alpha);

// Index drawn from a probability vector (entries >= 0, sum 1 within 1e-9).
int SampleCategorical(RngStream& rng, std::span<const double> probs);
int SampleCategorical(RngStream& rng, const Eigen::Ref<const Vector>& probs);

// Inverse-CDF draw without validation, for hot loops over rows that are
// stochastic by construction. Falls back to the last index with positive mass
// when rounding leaves u above the final cumulative sum.
int SampleCategoricalUnchecked(RngStream& rng, const double* probs, int size,
                               Eigen::Index stride = 1);

}  // namespace embope

#endif  // EMBOPE_SAMPLING_H_

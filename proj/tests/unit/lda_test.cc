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

#include "embope/lda.h"

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "embope/errors.h"
#include "embope/rng.h"
#include "embope/sampling.h"

namespace embope {
namespace {

TEST(LdaTest, PriorsAreEmpiricalFrequencies) {
  Matrix e(10, 1);
  std::vector<int> labels;
  for (int i = 0; i < 10; ++i) {
    e(i, 0) = i;
    labels.push_back(i < 1 ? 0 : (i < 4 ? 1 : 2));
  }
  const LdaClassifier lda = fit_lda(e, labels, 3);
  EXPECT_DOUBLE_EQ(lda.priors[0], 0.1);
  EXPECT_DOUBLE_EQ(lda.priors[1], 0.3);
  EXPECT_DOUBLE_EQ(lda.priors[2], 0.6);
  EXPECT_DOUBLE_EQ(lda.means(1, 0), 2.0);
  EXPECT_DOUBLE_EQ(lda.means(2, 0), 6.5);
}

TEST(LdaTest, SymmetricPointHasEqualPosterior) {
  Matrix e(4, 2);
  e << -1, 0, -1.2, 0.1, 1, 0, 1.2, -0.1;
  const std::vector<int> labels = {0, 0, 1, 1};
  const LdaClassifier lda = fit_lda(e, labels, 2);
  const Vector p = lda_posterior(lda, Vector(Vector::Zero(2)));
  EXPECT_NEAR(p[0], 0.5, 1e-12);
  EXPECT_NEAR(p[1], 0.5, 1e-12);
}

TEST(LdaTest, ZeroPriorClassGetsZeroPosterior) {
  Matrix e(4, 1);
  e << 0, 0.5, 3, 3.5;
  const std::vector<int> labels = {0, 0, 2, 2};
  const LdaClassifier lda = fit_lda(e, labels, 3);
  EXPECT_EQ(lda.priors[1], 0.0);
  Vector q(1);
  q << 1.0;
  const Vector p = lda_posterior(lda, q);
  EXPECT_EQ(p[1], 0.0);
  EXPECT_NEAR(p.sum(), 1.0, 1e-15);
}

TEST(LdaTest, TwoClassSphericalMatchesClosedForm) {
  Matrix e(6, 2);
  e << 0, 0, 1, 0, 0, 1, 3, 3, 4, 3, 3, 4;
  const std::vector<int> labels = {0, 0, 0, 1, 1, 1};
  LdaClassifier lda = fit_lda(e, labels, 2);
  lda = WithPriors(lda, Vector::Constant(2, 0.5));
  // mean0 = (1/3, 1/3), mean1 = (10/3, 10/3); ss over n d = 12.
  // Per class the squared deviations are 2/9, 5/9 and 5/9.
  const double sigma2 = 2.0 * (2.0 / 9 + 5.0 / 9 + 5.0 / 9) / 12.0;
  EXPECT_NEAR(lda.sigma2, sigma2, 1e-14);
  Vector x(2);
  x << 1.0, 2.0;
  const Vector m0 = Vector::Constant(2, 1.0 / 3);
  const Vector m1 = Vector::Constant(2, 10.0 / 3);
  const double logit =
      ((x - m0).squaredNorm() - (x - m1).squaredNorm()) / (2.0 * sigma2);
  EXPECT_NEAR(lda_posterior(lda, x)[1], 1.0 / (1.0 + std::exp(-logit)), 1e-12);
}

TEST(LdaTest, FullCovarianceMatchesDirectGaussianDensities) {
  RngStream rng(5);
  Matrix e = SampleStandardNormal(rng, 60, 2);
  std::vector<int> labels(60);
  for (int i = 0; i < 60; ++i) {
    labels[i] = i % 3;
    e(i, 0) += 2.0 * labels[i];
    e(i, 1) += 0.5 * e(i, 0);
  }
  const LdaClassifier lda = fit_lda(e, labels, 3, /*spherical=*/false);
  const Matrix& s = lda.covariance;
  const double det = s(0, 0) * s(1, 1) - s(0, 1) * s(1, 0);
  Matrix inv(2, 2);
  inv << s(1, 1), -s(0, 1), -s(1, 0), s(0, 0);
  inv /= det;
  Vector x(2);
  x << 1.3, -0.4;
  Vector dens(3);
  for (int a = 0; a < 3; ++a) {
    const Vector d = x - lda.means.row(a).transpose();
    dens[a] = lda.priors[a] * std::exp(-0.5 * d.dot(inv * d));
  }
  dens /= dens.sum();
  EXPECT_LT((lda_posterior(lda, x) - dens).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(LdaTest, RecoversMeansOnLargeSample) {
  RngStream rng(6);
  const int n = 40000;
  Matrix e = SampleStandardNormal(rng, n, 3);
  std::vector<int> labels(n);
  Matrix centers(2, 3);
  centers << 1, -2, 0.5, -1, 3, 2;
  for (int i = 0; i < n; ++i) {
    labels[i] = i % 2;
    e.row(i) += centers.row(labels[i]);
  }
  const LdaClassifier lda = fit_lda(e, labels, 2);
  EXPECT_LT((lda.means - centers).cwiseAbs().maxCoeff(), 0.05);
  EXPECT_NEAR(lda.sigma2, 1.0, 0.03);
}

TEST(LdaTest, RejectsDegenerateInput) {
  const std::vector<int> labels = {0, 1};
  EXPECT_THROW(fit_lda(Matrix::Zero(2, 1), labels, 2), ParameterError);
  const std::vector<int> bad = {0, 3};
  EXPECT_THROW(fit_lda(Matrix::Identity(2, 2), bad, 2), ParameterError);
  Matrix e(3, 1);
  e << 0, 1, 2;
  const std::vector<int> single = {0, 0, 1};
  EXPECT_THROW(fit_lda(e, single, 2, false), ParameterError);
  const LdaClassifier lda = fit_lda(e, std::vector<int>{0, 0, 0}, 1);
  EXPECT_THROW(WithPriors(lda, Vector::Constant(2, 0.5)), ParameterError);
  EXPECT_THROW(lda_posterior(lda, Matrix(Matrix::Zero(1, 2))), ParameterError);
}

}  // namespace
}  // namespace embope

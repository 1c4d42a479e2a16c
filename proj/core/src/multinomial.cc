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

#include "embope/multinomial.h"

#include <cmath>
#include <cstring>
#include <deque>
#include <string>
#include <unordered_map>

#include "embope/errors.h"

namespace embope {
namespace {

// Training data with identical feature rows merged: row u carries the total
// sample count and the per-class counts as sparse entries.
struct MergedProblem {
  struct Entry {
    int row;
    int label;
    double count;
  };
  Matrix features;
  Vector totals;
  std::vector<Entry> entries;
  double n = 0.0;
  int n_classes = 0;
};

MergedProblem Merge(const Matrix& features, std::span<const int> labels,
                    int n_classes) {
  if (features.rows() != static_cast<Eigen::Index>(labels.size())) {
    throw ParameterError("features and labels must have equal length");
  }
  if (features.rows() < 1) throw ParameterError("need at least one sample");
  if (n_classes < 1) throw ParameterError("n_classes must be positive");
  if (!features.allFinite()) {
    throw ParameterError("features contain non-finite values");
  }
  const auto f = features.cols();
  std::unordered_map<std::string, int> row_of;
  std::vector<Eigen::Index> first_source;
  std::unordered_map<long long, int> entry_of;
  MergedProblem p;
  p.n_classes = n_classes;
  std::vector<double> totals;
  std::string key(static_cast<size_t>(f) * sizeof(double), '\0');
  std::vector<double> buf(static_cast<size_t>(f));
  for (Eigen::Index t = 0; t < features.rows(); ++t) {
    const int label = labels[t];
    if (label < 0 || label >= n_classes) {
      throw ParameterError("label " + std::to_string(label) +
                           " outside [0, n_classes)");
    }
    for (Eigen::Index j = 0; j < f; ++j) {
      // Normalize -0.0 so it merges with 0.0.
      buf[j] = features(t, j) == 0.0 ? 0.0 : features(t, j);
    }
    if (f > 0) std::memcpy(key.data(), buf.data(), key.size());
    auto [it, inserted] =
        row_of.emplace(key, static_cast<int>(first_source.size()));
    if (inserted) {
      first_source.push_back(t);
      totals.push_back(0.0);
    }
    const int u = it->second;
    totals[u] += 1.0;
    const long long ek = static_cast<long long>(u) * n_classes + label;
    auto [eit, einserted] =
        entry_of.emplace(ek, static_cast<int>(p.entries.size()));
    if (einserted) {
      p.entries.push_back({u, label, 1.0});
    } else {
      p.entries[eit->second].count += 1.0;
    }
  }
  p.features.resize(static_cast<Eigen::Index>(first_source.size()), f);
  for (size_t u = 0; u < first_source.size(); ++u) {
    p.features.row(u) = features.row(first_source[u]);
  }
  p.totals = Eigen::Map<Vector>(totals.data(), static_cast<Eigen::Index>(totals.size()));
  p.n = static_cast<double>(features.rows());
  return p;
}

double Evaluate(const MergedProblem& p, double l2, const Matrix& w,
                const Vector& b, Matrix* gw, Vector* gb) {
  Matrix scores = p.features * w.transpose();
  scores.rowwise() += b.transpose();
  double loss = 0.0;
  for (const auto& e : p.entries) loss -= e.count * scores(e.row, e.label);
  for (Eigen::Index u = 0; u < scores.rows(); ++u) {
    const double shift = scores.row(u).maxCoeff();
    auto row = scores.row(u);
    const double z = (row.array() - shift).exp().sum();
    const double lse = shift + std::log(z);
    loss += p.totals[u] * lse;
    if (gw != nullptr) row = (row.array() - lse).exp() * p.totals[u];
  }
  loss = loss / p.n + 0.5 * l2 * w.squaredNorm();
  if (gw != nullptr) {
    for (const auto& e : p.entries) scores(e.row, e.label) -= e.count;
    *gw = scores.transpose() * p.features / p.n + l2 * w;
    *gb = scores.colwise().sum().transpose() / p.n;
  }
  return loss;
}

// Parameters flattened as [vec(W) (column-major), b].
struct Flat {
  Eigen::Index k;
  Eigen::Index f;
  Matrix W(const Vector& theta) const {
    return Eigen::Map<const Matrix>(theta.data(), k, f);
  }
  Vector B(const Vector& theta) const { return theta.tail(k); }
  Vector Join(const Matrix& w, const Vector& b) const {
    Vector theta(k * f + k);
    theta.head(k * f) = Eigen::Map<const Vector>(w.data(), k * f);
    theta.tail(k) = b;
    return theta;
  }
};

}  // namespace

MultinomialClassifier fit_multinomial(const Matrix& features,
                                      std::span<const int> labels,
                                      int n_classes,
                                      const MultinomialOptions& options) {
  if (!(options.l2 >= 0.0)) throw ParameterError("l2 must be non-negative");
  if (options.max_iters < 0) throw ParameterError("max_iters must be >= 0");
  if (options.history < 0) throw ParameterError("history must be >= 0");
  const MergedProblem problem = Merge(features, labels, n_classes);
  const Flat flat{n_classes, features.cols()};

  auto objective = [&](const Vector& theta, Vector* grad) {
    Matrix gw;
    Vector gb;
    const double value =
        Evaluate(problem, options.l2, flat.W(theta), flat.B(theta),
                 grad ? &gw : nullptr, grad ? &gb : nullptr);
    if (grad) *grad = flat.Join(gw, gb);
    return value;
  };

  Vector theta = Vector::Zero(flat.k * flat.f + flat.k);
  Vector grad;
  double loss = objective(theta, &grad);
  MultinomialFitInfo info;
  info.loss_history.push_back(loss);

  std::deque<Vector> s_hist, y_hist;
  std::deque<double> rho_hist;
  double last_step = 1.0;
  constexpr double kArmijo = 1e-4;

  for (int iter = 0; iter < options.max_iters; ++iter) {
    if (grad.lpNorm<Eigen::Infinity>() < options.gradient_tolerance) {
      info.converged = true;
      break;
    }
    // Two-loop recursion.
    Vector q = grad;
    std::vector<double> alpha(s_hist.size());
    for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
      alpha[i] = rho_hist[i] * s_hist[i].dot(q);
      q -= alpha[i] * y_hist[i];
    }
    if (!s_hist.empty()) {
      q *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
    }
    for (size_t i = 0; i < s_hist.size(); ++i) {
      const double beta = rho_hist[i] * y_hist[i].dot(q);
      q += s_hist[i] * (alpha[i] - beta);
    }
    Vector direction = -q;
    double slope = grad.dot(direction);
    if (!(slope < 0.0)) {
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      direction = -grad;
      slope = -grad.squaredNorm();
    }

    double step;
    if (s_hist.empty()) {
      step = options.history == 0 ? std::min(1.0, 2.0 * last_step)
                                  : 1.0 / std::max(1.0, grad.norm());
    } else {
      step = 1.0;
    }
    Vector candidate;
    Vector candidate_grad;
    double candidate_loss = loss;
    bool accepted = false;
    for (int halving = 0; halving < 60; ++halving) {
      candidate = theta + step * direction;
      candidate_loss = objective(candidate, &candidate_grad);
      if (std::isfinite(candidate_loss) &&
          candidate_loss <= loss + kArmijo * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // No decrease representable along this direction: at a numerical
      // minimum for all practical purposes.
      info.converged = grad.lpNorm<Eigen::Infinity>() < 1e3 * options.gradient_tolerance;
      break;
    }
    last_step = step;
    Vector s = candidate - theta;
    Vector y = candidate_grad - grad;
    const double sy = s.dot(y);
    if (options.history > 0 && sy > 1e-12 * s.norm() * y.norm()) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > options.history) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    const double decrease = loss - candidate_loss;
    theta = std::move(candidate);
    grad = std::move(candidate_grad);
    loss = candidate_loss;
    ++info.iterations;
    info.loss_history.push_back(loss);
    if (decrease <= options.relative_tolerance * std::max(1.0, std::abs(loss))) {
      info.converged = true;
      break;
    }
  }
  if (!info.converged &&
      grad.lpNorm<Eigen::Infinity>() < options.gradient_tolerance) {
    info.converged = true;
  }
  info.final_loss = loss;

  MultinomialClassifier clf;
  clf.weights = flat.W(theta);
  clf.intercepts = flat.B(theta);
  clf.l2 = options.l2;
  clf.info = std::move(info);
  return clf;
}

Matrix predict_proba(const MultinomialClassifier& classifier,
                     const Matrix& features) {
  if (features.cols() != classifier.n_features()) {
    throw ParameterError("feature width " + std::to_string(features.cols()) +
                         " does not match classifier width " +
                         std::to_string(classifier.n_features()));
  }
  Matrix scores = features * classifier.weights.transpose();
  scores.rowwise() += classifier.intercepts.transpose();
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    auto row = scores.row(i);
    row = (row.array() - row.maxCoeff()).exp();
    row /= row.sum();
  }
  return scores;
}

double multinomial_objective(const Matrix& features,
                             std::span<const int> labels, double l2,
                             const Matrix& weights, const Vector& intercepts,
                             Matrix* weights_grad, Vector* intercepts_grad) {
  if (weights.cols() != features.cols() ||
      intercepts.size() != weights.rows()) {
    throw ParameterError("parameter shapes do not match the features");
  }
  const MergedProblem problem =
      Merge(features, labels, static_cast<int>(weights.rows()));
  if ((weights_grad == nullptr) != (intercepts_grad == nullptr)) {
    throw ParameterError("request both gradients or neither");
  }
  return Evaluate(problem, l2, weights, intercepts, weights_grad,
                  intercepts_grad);
}

}  // namespace embope

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

#include "embope/reward_model.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "embope/errors.h"
#include "embope/rng.h"
#include "embope/sampling.h"
#include "json.hpp"

namespace embope {
namespace {

bool UsesIdentity(InputRepr repr) { return repr != InputRepr::kPredefined; }
bool UsesCodes(InputRepr repr) { return repr != InputRepr::kOneHot; }

int CategoricalWidth(const std::vector<int>& cardinalities) {
  int width = 0;
  for (int c : cardinalities) width += c;
  return width;
}

// Active feature columns of every sample, `per_row` entries each.
struct SampleFeatures {
  int per_row = 0;
  std::vector<int> index;
  const int* Row(int t) const { return index.data() + static_cast<size_t>(t) * per_row; }
};

SampleFeatures BuildSampleFeatures(InputRepr repr, int n_actions,
                                   const std::vector<int>& actions,
                                   const CodeMatrix* codes,
                                   const std::vector<int>& cardinalities) {
  SampleFeatures out;
  const int dims = UsesCodes(repr) ? static_cast<int>(cardinalities.size()) : 0;
  out.per_row = (UsesIdentity(repr) ? 1 : 0) + dims;
  if (out.per_row == 0) throw ParameterError("model input has no features");
  const int n = static_cast<int>(actions.size());
  out.index.resize(static_cast<size_t>(n) * out.per_row);
  const int base = UsesIdentity(repr) ? n_actions : 0;
  for (int t = 0; t < n; ++t) {
    int* row = out.index.data() + static_cast<size_t>(t) * out.per_row;
    int pos = 0;
    if (UsesIdentity(repr)) row[pos++] = actions[t];
    int offset = base;
    for (int k = 0; k < dims; ++k) {
      row[pos++] = offset + (*codes)(t, k);
      offset += cardinalities[k];
    }
  }
  return out;
}

FeatureMap FeatureMapFromCodes(InputRepr repr, int n_actions,
                               const CodeMatrix* codes,
                               const std::vector<int>& cardinalities) {
  std::vector<int> actions(static_cast<size_t>(n_actions));
  for (int a = 0; a < n_actions; ++a) actions[a] = a;
  const SampleFeatures rows =
      BuildSampleFeatures(repr, n_actions, actions, codes, cardinalities);
  const int width = (UsesIdentity(repr) ? n_actions : 0) +
                    (UsesCodes(repr) ? CategoricalWidth(cardinalities) : 0);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(rows.index.size());
  for (int a = 0; a < n_actions; ++a) {
    for (int j = 0; j < rows.per_row; ++j) triplets.emplace_back(a, rows.Row(a)[j], 1.0);
  }
  FeatureMap map(n_actions, width);
  map.setFromTriplets(triplets.begin(), triplets.end());
  map.makeCompressed();
  return map;
}

// Per-sample codes for the categorical part of the features.
struct CodeSource {
  CodeMatrix codes;
  std::vector<int> cardinalities;
};

CodeSource ResolveCodes(const LoggedDataset& data,
                        const CategoricalEmbeddingTable* table) {
  if (data.has_embeddings()) {
    if (table != nullptr &&
        table->cardinalities() != data.embedding_cardinalities()) {
      throw ParameterError(
          "embedding table does not match the dataset's embedding columns");
    }
    return {data.observed_embeddings(), data.embedding_cardinalities()};
  }
  if (table == nullptr) {
    throw ParameterError(
        "pre-defined embeddings required: the dataset has none and no table "
        "was given");
  }
  if (table->n_actions() != data.n_actions()) {
    throw ParameterError("embedding table must cover every action");
  }
  return {table->ForActions(data.actions()), table->cardinalities()};
}

SampleFeatures FeaturesFor(const RewardModel& model, const LoggedDataset& data,
                           const CategoricalEmbeddingTable* table) {
  if (data.n_actions() != model.n_actions) {
    throw ParameterError("dataset action count does not match the model");
  }
  if (!UsesCodes(model.repr)) {
    return BuildSampleFeatures(model.repr, model.n_actions, data.actions(),
                               nullptr, {});
  }
  const CodeSource src = ResolveCodes(data, table);
  if (src.cardinalities != model.cardinalities) {
    throw ParameterError("embedding cardinalities do not match the model");
  }
  return BuildSampleFeatures(model.repr, model.n_actions, data.actions(),
                             &src.codes, src.cardinalities);
}

// Row-major storage makes the per-sample row gathers contiguous.
using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Parameters being optimized, kept outside RewardModel for the hot loop.
struct Params {
  RowMatrix e;
  Matrix p;  // empty when full rank
  double b = 0.0;
  bool projected = false;
  bool bias = false;
};

// Batch forward pass over the given rows: U holds the action-side
// embeddings, V the context images, and the return value the predictions.
Vector Forward(const Params& w, const SampleFeatures& f, const RowMatrix& x,
               const int* rows, int count, Matrix& xb, Matrix& u, Matrix& v) {
  const auto d = w.e.cols();
  u.resize(count, d);
  xb.resize(count, x.cols());
  for (int i = 0; i < count; ++i) {
    const int* feat = f.Row(rows[i]);
    u.row(i) = w.e.row(feat[0]);
    for (int j = 1; j < f.per_row; ++j) u.row(i) += w.e.row(feat[j]);
    xb.row(i) = x.row(rows[i]);
  }
  if (w.projected) {
    v.noalias() = xb * w.p;
  } else {
    v = xb;
  }
  Vector pred = u.cwiseProduct(v).rowwise().sum();
  if (w.bias) pred.array() += w.b;
  return pred;
}

// Full-data MSE over contiguous chunks, without copying the contexts.
double Mse(const Params& w, const SampleFeatures& f, const RowMatrix& x,
           const Vector& r) {
  constexpr int kChunk = 4096;
  const int n = static_cast<int>(x.rows());
  Matrix u, v;
  double sum = 0.0;
  for (int start = 0; start < n; start += kChunk) {
    const int count = std::min(kChunk, n - start);
    u.resize(count, w.e.cols());
    for (int i = 0; i < count; ++i) {
      const int* feat = f.Row(start + i);
      u.row(i) = w.e.row(feat[0]);
      for (int j = 1; j < f.per_row; ++j) u.row(i) += w.e.row(feat[j]);
    }
    Vector pred;
    if (w.projected) {
      v.noalias() = x.middleRows(start, count) * w.p;
      pred = u.cwiseProduct(v).rowwise().sum();
    } else {
      pred = u.cwiseProduct(x.middleRows(start, count)).rowwise().sum();
    }
    if (w.bias) pred.array() += w.b;
    sum += (pred - r.segment(start, count)).squaredNorm();
  }
  return sum / static_cast<double>(n);
}

// Gradient of (1/|rows|) sum (pred - r)^2 + (l2/2)(||E||^2 + ||P||^2) over
// the given rows; returns the data term.
double Gradient(const Params& w, const SampleFeatures& f, const RowMatrix& x,
                const Vector& r, const int* rows, int count, double l2,
                Params& g) {
  Matrix xb, u, v;
  const Vector pred = Forward(w, f, x, rows, count, xb, u, v);
  Vector resid(count);
  for (int i = 0; i < count; ++i) resid[i] = pred[i] - r[rows[i]];
  const Vector gt = (2.0 / count) * resid;

  g.e.setZero(w.e.rows(), w.e.cols());
  for (int i = 0; i < count; ++i) {
    const int* feat = f.Row(rows[i]);
    for (int j = 0; j < f.per_row; ++j) g.e.row(feat[j]) += gt[i] * v.row(i);
  }
  if (w.projected) {
    g.p.noalias() = xb.transpose() * (gt.asDiagonal() * u);
  }
  g.b = w.bias ? gt.sum() : 0.0;
  if (l2 > 0.0) {
    g.e += l2 * w.e;
    if (w.projected) g.p += l2 * w.p;
  }
  return resid.squaredNorm() / count;
}

class Adam {
 public:
  Adam(const Params& like)
      : me_(RowMatrix::Zero(like.e.rows(), like.e.cols())),
        ve_(me_),
        mp_(Matrix::Zero(like.p.rows(), like.p.cols())),
        vp_(mp_) {}

  void Step(double lr, const Params& g, Params& w) {
    ++t_;
    const double c1 = 1.0 - std::pow(kBeta1, t_);
    const double c2 = 1.0 - std::pow(kBeta2, t_);
    Update(lr, c1, c2, g.e, me_, ve_, w.e);
    if (w.projected) Update(lr, c1, c2, g.p, mp_, vp_, w.p);
    if (w.bias) {
      mb_ = kBeta1 * mb_ + (1.0 - kBeta1) * g.b;
      vb_ = kBeta2 * vb_ + (1.0 - kBeta2) * g.b * g.b;
      w.b -= lr * (mb_ / c1) / (std::sqrt(vb_ / c2) + kEps);
    }
  }

 private:
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEps = 1e-8;

  template <typename M>
  static void Update(double lr, double c1, double c2, const M& g, M& m, M& v,
                     M& w) {
    m = kBeta1 * m + (1.0 - kBeta1) * g;
    v = kBeta2 * v + (1.0 - kBeta2) * g.cwiseAbs2();
    w.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + kEps);
  }

  RowMatrix me_, ve_;
  Matrix mp_, vp_;
  double mb_ = 0.0, vb_ = 0.0;
  int t_ = 0;
};

Params ParamsOf(const RewardModel& model) {
  Params w;
  w.e = model.embedding_layer;
  w.projected = model.context_projection.has_value();
  if (w.projected) w.p = *model.context_projection;
  w.bias = model.has_bias;
  w.b = model.bias;
  return w;
}

// Most frequent logged code per (action, dimension); code 0 when unlogged.
CodeMatrix ModalCodes(const std::vector<int>& actions, const CodeMatrix& codes,
                      const std::vector<int>& cardinalities, int n_actions) {
  const int dims = static_cast<int>(cardinalities.size());
  CodeMatrix out = CodeMatrix::Zero(n_actions, dims);
  for (int k = 0; k < dims; ++k) {
    CodeMatrix counts = CodeMatrix::Zero(n_actions, cardinalities[k]);
    for (size_t t = 0; t < actions.size(); ++t) {
      ++counts(actions[t], codes(static_cast<Eigen::Index>(t), k));
    }
    for (int a = 0; a < n_actions; ++a) {
      Eigen::Index best = 0;
      counts.row(a).maxCoeff(&best);
      out(a, k) = static_cast<int>(best);
    }
  }
  return out;
}

}  // namespace

const char* InputReprName(InputRepr repr) {
  switch (repr) {
    case InputRepr::kOneHot:
      return "onehot";
    case InputRepr::kPredefined:
      return "predefined";
    case InputRepr::kCombined:
      return "combined";
  }
  return "unknown";
}

FeatureMap build_action_features(InputRepr repr, int n_actions,
                                 const CategoricalEmbeddingTable* table) {
  if (n_actions < 1) throw ParameterError("n_actions must be positive");
  if (!UsesCodes(repr)) return FeatureMapFromCodes(repr, n_actions, nullptr, {});
  if (table == nullptr) {
    throw ParameterError(std::string(InputReprName(repr)) +
                         " features need a categorical embedding table");
  }
  if (table->n_actions() != n_actions) {
    throw ParameterError("embedding table must have one row per action");
  }
  return FeatureMapFromCodes(repr, n_actions, &table->codes(),
                             table->cardinalities());
}

void TrainConfig::Validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ParameterError("learning_rate must be positive");
  }
  if (epochs < 0) throw ParameterError("epochs must be >= 0");
  if (batch_size < 1) throw ParameterError("batch_size must be >= 1");
  if (!(l2 >= 0.0)) throw ParameterError("l2 must be non-negative");
  if (embedding_size < 0) throw ParameterError("embedding_size must be >= 0");
  if (!(init_sd >= 0.0)) throw ParameterError("init_sd must be non-negative");
  if (!(lr_decay > 0.0)) throw ParameterError("lr_decay must be positive");
}

RewardModel train_reward_model(const LoggedDataset& data, InputRepr repr,
                               const TrainConfig& config,
                               const CategoricalEmbeddingTable* table) {
  config.Validate();
  const int n = data.size();
  const int na = data.n_actions();
  const int dx = data.context_dim();
  if (n < 1) throw ParameterError("dataset is empty");

  RewardModel model;
  model.repr = repr;
  model.n_actions = na;
  model.has_bias = config.use_bias;
  SampleFeatures features;
  if (UsesCodes(repr)) {
    const CodeSource src = ResolveCodes(data, table);
    model.cardinalities = src.cardinalities;
    features = BuildSampleFeatures(repr, na, data.actions(), &src.codes,
                                   src.cardinalities);
    if (table != nullptr) {
      model.action_feature_map = build_action_features(repr, na, table);
    } else {
      const CodeMatrix modal =
          ModalCodes(data.actions(), src.codes, src.cardinalities, na);
      model.action_feature_map =
          FeatureMapFromCodes(repr, na, &modal, src.cardinalities);
    }
  } else {
    features = BuildSampleFeatures(repr, na, data.actions(), nullptr, {});
    model.action_feature_map = build_action_features(repr, na);
  }

  const int f = static_cast<int>(model.action_feature_map.cols());
  const bool projected = config.embedding_size > 0;
  const int d = projected ? config.embedding_size : dx;
  const SeededRng seeds(config.seed);
  Params w;
  {
    RngStream rng = seeds.Stream("init");
    w.e = SampleStandardNormal(rng, f, d) * config.init_sd;
    if (projected) w.p = SampleStandardNormal(rng, dx, d) * config.init_sd;
  }
  w.projected = projected;
  w.bias = config.use_bias;

  const RowMatrix x = data.contexts();
  const Vector& r = data.rewards();
  model.info.mse_history.push_back(Mse(w, features, x, r));

  Params grad;
  grad.projected = projected;
  grad.bias = config.use_bias;
  Adam adam(w);
  std::vector<int> order(static_cast<size_t>(n));
  double lr = config.learning_rate;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (int i = 0; i < n; ++i) order[i] = i;
    RngStream rng = seeds.Stream("shuffle", static_cast<std::uint64_t>(epoch));
    // Fisher-Yates with our own index draws: std::shuffle's output is
    // library-specific.
    for (int i = n - 1; i > 0; --i) {
      const int j = static_cast<int>(rng.NextUniform() * (i + 1));
      std::swap(order[i], order[j]);
    }
    for (int start = 0; start < n; start += config.batch_size) {
      const int count = std::min(config.batch_size, n - start);
      Gradient(w, features, x, r, order.data() + start, count, config.l2, grad);
      adam.Step(lr, grad, w);
    }
    lr *= config.lr_decay;
    const double mse = Mse(w, features, x, r);
    model.info.mse_history.push_back(mse);
    model.info.epochs_run = epoch + 1;
    if (!std::isfinite(mse) || !w.e.allFinite() ||
        (projected && !w.p.allFinite())) {
      throw TrainingDivergenceError(
          epoch + 1, "reward model loss is not finite after epoch " +
                         std::to_string(epoch + 1));
    }
  }

  model.embedding_layer = w.e;
  if (projected) model.context_projection = std::move(w.p);
  model.bias = w.b;
  model.info.final_mse = model.info.mse_history.back();
  return model;
}

Matrix extract_embeddings(const RewardModel& model) {
  return model.action_feature_map * model.embedding_layer;
}

Matrix sample_embeddings(const RewardModel& model, const LoggedDataset& data,
                         const CategoricalEmbeddingTable* table) {
  const SampleFeatures f = FeaturesFor(model, data, table);
  Matrix out(data.size(), model.embedding_size());
  for (int t = 0; t < data.size(); ++t) {
    const int* row = f.Row(t);
    out.row(t) = model.embedding_layer.row(row[0]);
    for (int j = 1; j < f.per_row; ++j) out.row(t) += model.embedding_layer.row(row[j]);
  }
  return out;
}

Matrix predict_all(const RewardModel& model, const Matrix& contexts) {
  const Matrix u = extract_embeddings(model);
  Matrix q;
  if (model.context_projection.has_value()) {
    if (contexts.cols() != model.context_projection->rows()) {
      throw ParameterError("context dimension does not match the model");
    }
    q.noalias() = (contexts * *model.context_projection) * u.transpose();
  } else {
    if (contexts.cols() != model.embedding_size()) {
      throw ParameterError("context dimension does not match the model");
    }
    q.noalias() = contexts * u.transpose();
  }
  if (model.has_bias) q.array() += model.bias;
  return q;
}

Vector predict_reward(const RewardModel& model, const Matrix& contexts,
                      int action) {
  if (action < 0 || action >= model.n_actions) {
    throw ParameterError("action " + std::to_string(action) + " out of range");
  }
  const Eigen::RowVectorXd u =
      model.action_feature_map.row(action) * model.embedding_layer;
  Vector out;
  if (model.context_projection.has_value()) {
    if (contexts.cols() != model.context_projection->rows()) {
      throw ParameterError("context dimension does not match the model");
    }
    out = contexts * (*model.context_projection * u.transpose());
  } else {
    if (contexts.cols() != model.embedding_size()) {
      throw ParameterError("context dimension does not match the model");
    }
    out = contexts * u.transpose();
  }
  if (model.has_bias) out.array() += model.bias;
  return out;
}

double reward_model_objective(const RewardModel& model,
                              const LoggedDataset& data, double l2,
                              RewardModelGradient* gradient,
                              const CategoricalEmbeddingTable* table) {
  const SampleFeatures f = FeaturesFor(model, data, table);
  const Params w = ParamsOf(model);
  if (w.projected ? data.context_dim() != w.p.rows()
                  : data.context_dim() != w.e.cols()) {
    throw ParameterError("context dimension does not match the model");
  }
  std::vector<int> rows(static_cast<size_t>(data.size()));
  for (int t = 0; t < data.size(); ++t) rows[t] = t;
  Params g;
  g.projected = w.projected;
  g.bias = w.bias;
  const double mse = Gradient(w, f, RowMatrix(data.contexts()), data.rewards(),
                              rows.data(), data.size(), l2, g);
  double penalty = w.e.squaredNorm();
  if (w.projected) penalty += w.p.squaredNorm();
  if (gradient != nullptr) {
    gradient->embedding_layer = g.e;
    gradient->context_projection = std::move(g.p);
    gradient->bias = g.b;
  }
  return mse + 0.5 * l2 * penalty;
}

Matrix with_intercept_column(const Matrix& contexts) {
  Matrix out(contexts.rows(), contexts.cols() + 1);
  out.leftCols(contexts.cols()) = contexts;
  out.col(contexts.cols()).setOnes();
  return out;
}

std::string reward_model_to_json(const RewardModel& model) {
  using nlohmann::json;
  auto matrix = [](const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
      rows.push_back(std::move(row));
    }
    return rows;
  };
  json doc;
  doc["input"] = InputReprName(model.repr);
  doc["n_actions"] = model.n_actions;
  doc["cardinalities"] = model.cardinalities;
  doc["feature_map_shape"] = {model.action_feature_map.rows(),
                              model.action_feature_map.cols()};
  doc["embedding_layer"] = matrix(model.embedding_layer);
  doc["context_projection"] = model.context_projection.has_value()
                                  ? matrix(*model.context_projection)
                                  : json(nullptr);
  doc["has_bias"] = model.has_bias;
  doc["bias"] = model.bias;
  doc["epochs_run"] = model.info.epochs_run;
  doc["final_mse"] = model.info.final_mse;
  doc["mse_history"] = model.info.mse_history;
  return doc.dump(2);
}

}  // namespace embope

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

#include "embope/bench/csv_io.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "embope/errors.h"

namespace embope {
namespace {

std::vector<std::string> SplitLine(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

void StripCarriageReturn(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

double ParseDouble(const std::string& s, long row, const std::string& column) {
  double v = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  while (begin < end && *begin == ' ') ++begin;
  if (begin < end && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) {
    throw LoadError(row, column,
                    "row " + std::to_string(row) + ", column " + column +
                        ": cannot parse '" + s + "' as a number");
  }
  return v;
}

int ParseInt(const std::string& s, long row, const std::string& column) {
  int v = 0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  while (begin < end && *begin == ' ') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) {
    throw LoadError(row, column,
                    "row " + std::to_string(row) + ", column " + column +
                        ": expected an integer, got '" + s + "'");
  }
  return v;
}

[[noreturn]] void Fail(long row, const std::string& column,
                       const std::string& what) {
  throw LoadError(row, column,
                  "row " + std::to_string(row) + ", column " + column + ": " +
                      what);
}

// Index of "<prefix><k>" columns, requiring k = 0..count-1 without gaps.
std::vector<int> NumberedColumns(const std::map<std::string, int>& index,
                                 const std::string& prefix) {
  std::vector<int> cols;
  std::map<int, int> by_number;
  for (const auto& [name, col] : index) {
    if (name.rfind(prefix, 0) != 0) continue;
    const std::string digits = name.substr(prefix.size());
    int k = -1;
    const auto [ptr, ec] =
        std::from_chars(digits.data(), digits.data() + digits.size(), k);
    if (digits.empty() || ec != std::errc() ||
        ptr != digits.data() + digits.size() || k < 0) {
      Fail(0, name, "unrecognized column name");
    }
    by_number[k] = col;
  }
  int expected = 0;
  for (const auto& [k, col] : by_number) {
    if (k != expected) {
      Fail(0, prefix + std::to_string(expected), "missing column");
    }
    cols.push_back(col);
    ++expected;
  }
  return cols;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw IoError("cannot format a double");
  return std::string(buf, ptr);
}

LoadedLog parse_logged_csv(std::istream& in, const CsvSchemaOptions& options) {
  std::string line;
  if (!std::getline(in, line)) Fail(0, "header", "file is empty");
  StripCarriageReturn(line);
  const std::vector<std::string> header = SplitLine(line);
  std::map<std::string, int> index;
  for (size_t c = 0; c < header.size(); ++c) {
    if (!index.emplace(header[c], static_cast<int>(c)).second) {
      Fail(0, header[c], "duplicate column");
    }
  }
  for (const char* required : {"action", "reward", "pscore"}) {
    if (!index.count(required)) Fail(0, required, "missing column");
  }
  std::map<std::string, int> numbered;
  for (const auto& [name, col] : index) {
    if (name == "action" || name == "reward" || name == "pscore") continue;
    if (name.rfind("x_", 0) == 0 || name.rfind("emb_", 0) == 0) {
      numbered.emplace(name, col);
    } else {
      Fail(0, name, "unrecognized column name");
    }
  }
  std::map<std::string, int> xs, embs;
  for (const auto& [name, col] : numbered) {
    (name[0] == 'x' ? xs : embs).emplace(name, col);
  }
  const std::vector<int> x_cols = NumberedColumns(xs, "x_");
  const std::vector<int> e_cols = NumberedColumns(embs, "emb_");
  if (x_cols.empty()) Fail(0, "x_0", "missing column");
  const int action_col = index["action"];
  const int reward_col = index["reward"];
  const int pscore_col = index["pscore"];
  if (options.cardinalities &&
      options.cardinalities->size() != e_cols.size()) {
    Fail(0, "emb_0", "declared cardinalities do not match embedding columns");
  }

  std::vector<double> x_values;
  std::vector<int> actions;
  std::vector<double> rewards, pscores;
  std::vector<int> codes;
  long row = 0;
  while (std::getline(in, line)) {
    StripCarriageReturn(line);
    if (line.empty()) continue;
    ++row;
    const std::vector<std::string> fields = SplitLine(line);
    if (fields.size() != header.size()) {
      const size_t missing = std::min(fields.size(), header.size());
      Fail(row, missing < header.size() ? header[missing] : header.back(),
           "expected " + std::to_string(header.size()) + " fields, found " +
               std::to_string(fields.size()));
    }
    for (size_t j = 0; j < x_cols.size(); ++j) {
      const std::string name = "x_" + std::to_string(j);
      const double v = ParseDouble(fields[x_cols[j]], row, name);
      if (!std::isfinite(v)) Fail(row, name, "context is not finite");
      x_values.push_back(v);
    }
    const int a = ParseInt(fields[action_col], row, "action");
    if (a < 0) Fail(row, "action", "negative action index");
    if (options.n_actions && a >= *options.n_actions) {
      Fail(row, "action", "action " + std::to_string(a) +
                              " is not below the declared |A| = " +
                              std::to_string(*options.n_actions));
    }
    actions.push_back(a);
    const double r = ParseDouble(fields[reward_col], row, "reward");
    if (!std::isfinite(r)) Fail(row, "reward", "reward is not finite");
    rewards.push_back(r);
    const double p = ParseDouble(fields[pscore_col], row, "pscore");
    if (!(p > 0.0 && p <= 1.0)) {
      Fail(row, "pscore", "propensity " + fields[pscore_col] +
                              " is outside (0, 1]");
    }
    pscores.push_back(p);
    for (size_t k = 0; k < e_cols.size(); ++k) {
      const std::string name = "emb_" + std::to_string(k);
      const int code = ParseInt(fields[e_cols[k]], row, name);
      if (code < 0) Fail(row, name, "negative embedding code");
      if (options.cardinalities && code >= (*options.cardinalities)[k]) {
        Fail(row, name, "code " + std::to_string(code) +
                            " exceeds the declared cardinality");
      }
      codes.push_back(code);
    }
  }
  if (row == 0) Fail(0, "header", "no data rows");

  const int n = static_cast<int>(row);
  const int dx = static_cast<int>(x_cols.size());
  const int de = static_cast<int>(e_cols.size());
  int n_actions = 0;
  for (int a : actions) n_actions = std::max(n_actions, a + 1);
  if (options.n_actions) n_actions = *options.n_actions;

  Matrix contexts(n, dx);
  for (int t = 0; t < n; ++t)
    for (int j = 0; j < dx; ++j) contexts(t, j) = x_values[static_cast<size_t>(t) * dx + j];
  Vector r = Eigen::Map<Vector>(rewards.data(), n);
  Vector p = Eigen::Map<Vector>(pscores.data(), n);

  std::optional<CodeMatrix> code_matrix;
  std::optional<std::vector<int>> cards;
  if (de > 0) {
    CodeMatrix cm(n, de);
    std::vector<int> card(static_cast<size_t>(de), 1);
    for (int t = 0; t < n; ++t) {
      for (int k = 0; k < de; ++k) {
        cm(t, k) = codes[static_cast<size_t>(t) * de + k];
        card[k] = std::max(card[k], cm(t, k) + 1);
      }
    }
    if (options.cardinalities) card = *options.cardinalities;
    code_matrix = std::move(cm);
    cards = std::move(card);
  }

  LoggedDataset data(std::move(contexts), std::move(actions), std::move(r),
                     std::move(p), n_actions, code_matrix, cards);
  if (auto logging = infer_context_free_logging(data)) {
    data = data.WithLoggingPolicy(broadcast_policy(*logging, n));
  }

  std::optional<CategoricalEmbeddingTable> table;
  if (de > 0) {
    CodeMatrix per_action = CodeMatrix::Constant(n_actions, de, -1);
    bool consistent = true;
    for (int t = 0; t < n && consistent; ++t) {
      const int a = data.actions()[t];
      for (int k = 0; k < de; ++k) {
        int& slot = per_action(a, k);
        if (slot < 0) {
          slot = (*code_matrix)(t, k);
        } else if (slot != (*code_matrix)(t, k)) {
          consistent = false;
        }
      }
    }
    if (consistent && per_action.minCoeff() >= 0) {
      table.emplace(std::move(per_action), *cards);
    }
  }
  return {std::move(data), std::move(table)};
}

LoadedLog load_logged_csv(const std::string& path,
                          const CsvSchemaOptions& options) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return parse_logged_csv(in, options);
}

void write_logged_csv(const std::string& path, const LoggedDataset& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  const int dx = data.context_dim();
  const int de = data.has_embeddings()
                     ? static_cast<int>(data.observed_embeddings().cols())
                     : 0;
  for (int j = 0; j < dx; ++j) out << "x_" << j << ',';
  out << "action,reward,pscore";
  for (int k = 0; k < de; ++k) out << ",emb_" << k;
  out << '\n';
  for (int t = 0; t < data.size(); ++t) {
    for (int j = 0; j < dx; ++j) out << format_double(data.contexts()(t, j)) << ',';
    out << data.actions()[t] << ',' << format_double(data.rewards()[t]) << ','
        << format_double(data.logging_propensities()[t]);
    for (int k = 0; k < de; ++k) out << ',' << data.observed_embeddings()(t, k);
    out << '\n';
  }
  if (!out) throw IoError("failed while writing " + path);
}

std::optional<Vector> infer_context_free_logging(const LoggedDataset& data) {
  const int na = data.n_actions();
  const Vector& p = data.logging_propensities();
  const double uniform = 1.0 / na;
  bool all_uniform = true;
  for (int t = 0; t < data.size() && all_uniform; ++t) {
    all_uniform = std::abs(p[t] - uniform) <= 1e-12;
  }
  if (all_uniform) return Vector::Constant(na, uniform);

  Vector per_action = Vector::Constant(na, -1.0);
  for (int t = 0; t < data.size(); ++t) {
    double& slot = per_action[data.actions()[t]];
    if (slot < 0.0) {
      slot = p[t];
    } else if (std::abs(slot - p[t]) > 1e-12) {
      return std::nullopt;
    }
  }
  if (per_action.minCoeff() < 0.0) return std::nullopt;
  if (std::abs(per_action.sum() - 1.0) > 1e-9) return std::nullopt;
  return per_action / per_action.sum();
}

LoggedDataset bootstrap_sample(const LoggedDataset& data, int size,
                               RngStream& rng) {
  if (size < 1) throw ParameterError("bootstrap size must be positive");
  std::vector<int> rows(static_cast<size_t>(size));
  const int n = data.size();
  for (int i = 0; i < size; ++i) {
    rows[i] = std::min(n - 1, static_cast<int>(rng.NextUniform() * n));
  }
  return data.Subset(rows);
}

Vector load_action_distribution_csv(const std::string& path, int n_actions) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) Fail(0, "header", "file is empty");
  StripCarriageReturn(line);
  if (line != "action,prob") Fail(0, "header", "expected 'action,prob'");
  Vector probs = Vector::Constant(n_actions, -1.0);
  long row = 0;
  while (std::getline(in, line)) {
    StripCarriageReturn(line);
    if (line.empty()) continue;
    ++row;
    const std::vector<std::string> fields = SplitLine(line);
    if (fields.size() != 2) Fail(row, "prob", "expected 2 fields");
    const int a = ParseInt(fields[0], row, "action");
    if (a < 0 || a >= n_actions) Fail(row, "action", "action out of range");
    if (probs[a] >= 0.0) Fail(row, "action", "action listed twice");
    const double p = ParseDouble(fields[1], row, "prob");
    if (!(p >= 0.0 && p <= 1.0)) Fail(row, "prob", "probability outside [0, 1]");
    probs[a] = p;
  }
  if (probs.minCoeff() < 0.0) {
    Eigen::Index missing = 0;
    probs.minCoeff(&missing);
    Fail(row, "action",
         "action " + std::to_string(missing) + " has no probability");
  }
  if (std::abs(probs.sum() - 1.0) > 1e-9) {
    Fail(row, "prob", "probabilities do not sum to 1");
  }
  return probs;
}

void write_action_distribution_csv(const std::string& path,
                                   const Vector& probs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << "action,prob\n";
  for (Eigen::Index a = 0; a < probs.size(); ++a) {
    out << a << ',' << format_double(probs[a]) << '\n';
  }
  if (!out) throw IoError("failed while writing " + path);
}

}  // namespace embope

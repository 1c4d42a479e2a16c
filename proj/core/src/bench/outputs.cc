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

#include "embope/bench/outputs.h"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "embope/bench/csv_io.h"
#include "embope/errors.h"
#include "json.hpp"

namespace embope {
namespace {

constexpr const char* kCellHeader =
    "experiment,n_actions,n_samples,d_e,hidden_dims,emb_size";

std::ofstream OpenForWrite(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  return out;
}

void Finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError("failed while writing " + path);
}

void WriteCell(std::ostream& out, const std::string& experiment,
               const CellCoordinates& c) {
  out << experiment << ',' << c.n_actions << ',' << c.n_samples << ','
      << c.embedding_dims << ',' << c.hidden_dims << ',' << c.embedding_size;
}

// Error messages go into a CSV cell: no separators, quotes or line breaks.
std::string Sanitize(const std::string& s) {
  std::string out = s;
  for (char& ch : out) {
    if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
    if (ch == '"') ch = '\'';
  }
  return out;
}

std::vector<std::string> Split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

template <typename T>
T ParseField(const std::string& s, long row, const char* column) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw LoadError(row, column,
                    "row " + std::to_string(row) + ", column " + column +
                        ": cannot parse '" + s + "'");
  }
  return v;
}

struct PlotAxis {
  const char* name;
  int (*get)(const CellCoordinates&);
};

const PlotAxis kAxes[] = {
    {"n_actions", [](const CellCoordinates& c) { return c.n_actions; }},
    {"n_samples", [](const CellCoordinates& c) { return c.n_samples; }},
    {"d_e", [](const CellCoordinates& c) { return c.embedding_dims; }},
    {"hidden_dims", [](const CellCoordinates& c) { return c.hidden_dims; }},
    {"emb_size", [](const CellCoordinates& c) { return c.embedding_size; }},
};

}  // namespace

void write_runs_csv(const std::string& path,
                    const std::vector<RunRecord>& runs) {
  std::ofstream out = OpenForWrite(path);
  out << kCellHeader
      << ",run,seed,estimator,estimate,true_value,squared_error,status,error\n";
  for (const RunRecord& r : runs) {
    WriteCell(out, r.experiment, r.cell);
    out << ',' << r.run << ',' << r.seed << ',' << r.estimator << ','
        << format_double(r.estimate) << ',' << format_double(r.true_value)
        << ',' << format_double(r.squared_error) << ','
        << (r.ok ? "ok" : "failed") << ',' << Sanitize(r.error) << '\n';
  }
  Finish(out, path);
}

void write_aggregates_csv(const std::string& path,
                          const std::vector<AggregateRecord>& aggregates) {
  std::ofstream out = OpenForWrite(path);
  out << kCellHeader << ",estimator,mse_mean,mse_stderr,runs,failed\n";
  for (const AggregateRecord& a : aggregates) {
    WriteCell(out, a.experiment, a.cell);
    out << ',' << a.estimator << ',' << format_double(a.mse_mean) << ','
        << format_double(a.mse_stderr) << ',' << a.runs << ',' << a.failed
        << '\n';
  }
  Finish(out, path);
}

void write_aggregates_json(const std::string& path,
                           const std::vector<AggregateRecord>& aggregates) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const AggregateRecord& a : aggregates) {
    nlohmann::ordered_json row;
    row["experiment"] = a.experiment;
    row["n_actions"] = a.cell.n_actions;
    row["n_samples"] = a.cell.n_samples;
    row["d_e"] = a.cell.embedding_dims;
    row["hidden_dims"] = a.cell.hidden_dims;
    row["emb_size"] = a.cell.embedding_size;
    row["estimator"] = a.estimator;
    row["mse_mean"] = a.mse_mean;  // NaN serializes as null
    row["mse_stderr"] = a.mse_stderr;
    row["runs"] = a.runs;
    row["failed"] = a.failed;
    doc.push_back(std::move(row));
  }
  std::ofstream out = OpenForWrite(path);
  out << doc.dump(2) << '\n';
  Finish(out, path);
}

void write_cdf_csv(const std::string& path,
                   const std::vector<RelativeCdf>& cdfs) {
  std::ofstream out = OpenForWrite(path);
  out << kCellHeader << ",estimator,x,cdf\n";
  for (const RelativeCdf& cdf : cdfs) {
    for (const auto& [x, y] : cdf_step_points(cdf)) {
      WriteCell(out, cdf.experiment, cdf.cell);
      out << ',' << cdf.estimator << ',' << format_double(x) << ','
          << format_double(y) << '\n';
    }
  }
  Finish(out, path);
}

void write_cdf_summary_csv(const std::string& path,
                           const std::vector<RelativeCdf>& cdfs) {
  std::ofstream out = OpenForWrite(path);
  out << kCellHeader << ",estimator,samples,excluded,cdf_at_1\n";
  for (const RelativeCdf& cdf : cdfs) {
    WriteCell(out, cdf.experiment, cdf.cell);
    out << ',' << cdf.estimator << ',' << cdf.sorted.size() << ','
        << cdf.excluded << ',' << format_double(cdf_at(cdf, 1.0)) << '\n';
  }
  Finish(out, path);
}

void write_plot_data_csv(const std::string& path,
                         const ExperimentResult& result,
                         const std::vector<RelativeCdf>& cdfs) {
  std::ofstream out = OpenForWrite(path);
  out << "x,y,series\n";
  if (!cdfs.empty()) {
    std::map<CellCoordinates, int> cells;
    for (const RelativeCdf& cdf : cdfs) cells.emplace(cdf.cell, 0);
    for (const RelativeCdf& cdf : cdfs) {
      std::string series = cdf.estimator;
      if (cells.size() > 1) {
        series += "|hidden_dims=" + std::to_string(cdf.cell.hidden_dims) +
                  "|emb_size=" + std::to_string(cdf.cell.embedding_size);
      }
      for (const auto& [x, y] : cdf_step_points(cdf)) {
        out << format_double(x) << ',' << format_double(y) << ',' << series
            << '\n';
      }
    }
    Finish(out, path);
    return;
  }

  std::vector<const PlotAxis*> varying;
  for (const PlotAxis& axis : kAxes) {
    std::set<int> values;
    for (const AggregateRecord& a : result.aggregates) {
      values.insert(axis.get(a.cell));
    }
    if (values.size() > 1) varying.push_back(&axis);
  }
  const PlotAxis* x_axis = varying.empty() ? &kAxes[0] : varying.front();
  const bool relative = result.experiment == "embed-size";
  std::map<CellCoordinates, double> ips_mse;
  for (const AggregateRecord& a : result.aggregates) {
    if (a.estimator == "ips") ips_mse[a.cell] = a.mse_mean;
  }
  for (const AggregateRecord& a : result.aggregates) {
    if (relative && a.estimator == "ips") continue;
    double y = a.mse_mean;
    if (relative) {
      auto it = ips_mse.find(a.cell);
      if (it == ips_mse.end()) continue;
      y = a.mse_mean / it->second;
    }
    std::string series = a.estimator;
    for (const PlotAxis* axis : varying) {
      if (axis == x_axis) continue;
      series += std::string("|") + axis->name + "=" +
                std::to_string(axis->get(a.cell));
    }
    out << x_axis->get(a.cell) << ',' << format_double(y) << ',' << series
        << '\n';
  }
  Finish(out, path);
}

std::vector<RunRecord> read_runs_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw LoadError(0, "header", path + " is empty");
  std::vector<RunRecord> out;
  long row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++row;
    const std::vector<std::string> f = Split(line);
    if (f.size() != 14) {
      throw LoadError(row, "error",
                      "row " + std::to_string(row) + ": expected 14 fields");
    }
    RunRecord r;
    r.experiment = f[0];
    r.cell.n_actions = ParseField<int>(f[1], row, "n_actions");
    r.cell.n_samples = ParseField<int>(f[2], row, "n_samples");
    r.cell.embedding_dims = ParseField<int>(f[3], row, "d_e");
    r.cell.hidden_dims = ParseField<int>(f[4], row, "hidden_dims");
    r.cell.embedding_size = ParseField<int>(f[5], row, "emb_size");
    r.run = ParseField<int>(f[6], row, "run");
    r.seed = ParseField<std::uint64_t>(f[7], row, "seed");
    r.estimator = f[8];
    r.estimate = ParseField<double>(f[9], row, "estimate");
    r.true_value = ParseField<double>(f[10], row, "true_value");
    r.squared_error = ParseField<double>(f[11], row, "squared_error");
    if (f[12] != "ok" && f[12] != "failed") {
      throw LoadError(row, "status", "row " + std::to_string(row) +
                                         ": status must be ok or failed");
    }
    r.ok = f[12] == "ok";
    r.error = f[13];
    out.push_back(std::move(r));
  }
  return out;
}

void emit_outputs(const std::string& dir, const ExperimentResult& result,
                  const std::vector<RelativeCdf>& cdfs) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir + ": " + ec.message());
  const std::filesystem::path base(dir);
  write_runs_csv((base / "runs.csv").string(), result.runs);
  write_aggregates_csv((base / "aggregates.csv").string(), result.aggregates);
  write_aggregates_json((base / "aggregates.json").string(),
                        result.aggregates);
  write_plot_data_csv((base / "plot_data.csv").string(), result, cdfs);
  if (!cdfs.empty()) {
    write_cdf_csv((base / "cdf.csv").string(), cdfs);
    write_cdf_summary_csv((base / "cdf_summary.csv").string(), cdfs);
  }
}

}  // namespace embope

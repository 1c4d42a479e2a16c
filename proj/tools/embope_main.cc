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

// Command line front end for the experiment grids.
//
//   embope toy|synth|hidden-dims|embed-size|real [flags]
//   embope cdf --runs-csv runs.csv --out dir
//
// A JSON file given with --config is applied first; flags override it.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "embope/bench/experiment.h"
#include "embope/bench/outputs.h"
#include "embope/bench/relative_cdf.h"
#include "embope/errors.h"

namespace {

using embope::ExperimentKind;
using embope::ExperimentSpec;

struct Flags {
  std::optional<std::string> actions, samples, emb_dims, hide_dims, emb_sizes,
      estimators, out, config;
  std::optional<int> runs;
  std::optional<std::uint64_t> seed;
  // real
  std::optional<std::string> data, target, truth, standin;
  int standin_rows = 20000;
  // cdf
  std::string runs_csv;
  std::string reference = "ips";
};

std::vector<std::string> SplitList(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(s);
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(' '));
    item.erase(item.find_last_not_of(' ') + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<int> IntList(const std::string& s, const char* flag) {
  std::vector<int> out;
  for (const std::string& item : SplitList(s)) {
    if (item == "full") {
      out.push_back(0);
      continue;
    }
    try {
      size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw embope::ParameterError(std::string(flag) +
                                   ": expected a comma-separated list of "
                                   "integers, got '" + s + "'");
    }
  }
  if (out.empty()) {
    throw embope::ParameterError(std::string(flag) + " must not be empty");
  }
  return out;
}

ExperimentSpec DefaultSpec(ExperimentKind kind) {
  ExperimentSpec spec;
  spec.kind = kind;
  switch (kind) {
    case ExperimentKind::kToy:
      spec.action_counts = {50, 100, 200, 500, 1000};
      spec.sample_sizes = {1000};
      spec.embedding_dims = {0};
      spec.runs = 750;  // 50 reward functions x 15 datasets
      break;
    case ExperimentKind::kSynthGrid:
      spec.action_counts = {10, 50, 100, 500, 1000, 2000};
      spec.sample_sizes = {20000};
      spec.runs = 100;
      break;
    case ExperimentKind::kHiddenDims:
      spec.action_counts = {500};
      spec.embedding_dims = {4};
      spec.hidden_dims = {0, 1, 2, 3};
      spec.runs = 100;
      break;
    case ExperimentKind::kEmbedSize:
      spec.action_counts = {100};
      spec.synth.context_dim = 100;
      spec.embedding_sizes = {2, 4, 8, 16, 32, 64, 0};
      spec.runs = 100;
      break;
    case ExperimentKind::kRealProtocol:
      spec.runs = 150;
      break;
  }
  return spec;
}

void AddExperimentFlags(CLI::App* app, Flags& f, bool real) {
  app->add_option("--actions", f.actions, "Action counts, comma separated");
  app->add_option("--samples", f.samples,
                  real ? "Bootstrap sample size" : "Sample sizes");
  app->add_option("--emb-dims", f.emb_dims, "Pre-defined embedding dims");
  app->add_option("--hide-dims", f.hide_dims, "Hidden embedding dims");
  app->add_option("--emb-sizes", f.emb_sizes,
                  "Learned embedding sizes (0 or 'full' for d_X)");
  app->add_option("--estimators", f.estimators, "Estimator names");
  app->add_option("--runs", f.runs, "Runs per cell");
  app->add_option("--seed", f.seed, "Master seed");
  app->add_option("--out", f.out, "Output directory");
  app->add_option("--config", f.config, "JSON config file");
  if (real) {
    app->add_option("--data", f.data, "Logged-data CSV");
    app->add_option("--target", f.target, "Target distribution CSV");
    app->add_option("--truth", f.truth, "JSON file with policy_value");
    app->add_option("--standin", f.standin,
                    "Generate a synthetic stand-in into this directory and "
                    "run on it");
    app->add_option("--standin-rows", f.standin_rows, "Stand-in row count");
  }
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw embope::IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentSpec BuildSpec(ExperimentKind kind, const Flags& f) {
  ExperimentSpec spec = DefaultSpec(kind);
  if (f.config) embope::apply_json_config(ReadFile(*f.config), spec);
  if (f.actions) spec.action_counts = IntList(*f.actions, "--actions");
  if (f.samples) {
    const std::vector<int> n = IntList(*f.samples, "--samples");
    if (kind == ExperimentKind::kRealProtocol) {
      if (n.size() != 1) {
        throw embope::ParameterError("real takes a single --samples value");
      }
      spec.real.bootstrap_size = n.front();
    } else {
      spec.sample_sizes = n;
    }
  }
  if (f.emb_dims) spec.embedding_dims = IntList(*f.emb_dims, "--emb-dims");
  if (f.hide_dims) spec.hidden_dims = IntList(*f.hide_dims, "--hide-dims");
  if (f.emb_sizes) spec.embedding_sizes = IntList(*f.emb_sizes, "--emb-sizes");
  if (f.estimators) spec.estimators = SplitList(*f.estimators);
  if (f.runs) spec.runs = *f.runs;
  if (f.seed) spec.seed = *f.seed;
  if (f.out) spec.output_dir = *f.out;
  if (f.data) spec.real.data_path = *f.data;
  if (f.target) spec.real.target_path = *f.target;
  if (f.truth) spec.real.truth_path = *f.truth;
  if (kind == ExperimentKind::kRealProtocol && f.standin) {
    const embope::RealProtocolOptions files =
        embope::make_real_standin(*f.standin, f.standin_rows, spec.seed);
    spec.real.data_path = files.data_path;
    spec.real.target_path = files.target_path;
    spec.real.truth_path = files.truth_path;
    spec.real.n_actions = files.n_actions;
  }
  return spec;
}

void PrintAggregates(const embope::ExperimentResult& result) {
  std::printf("%-8s %-8s %-4s %-6s %-8s %-24s %-14s %-12s %s\n", "actions",
              "samples", "d_e", "hidden", "emb_size", "estimator", "mse",
              "stderr", "runs(failed)");
  for (const auto& a : result.aggregates) {
    std::printf("%-8d %-8d %-4d %-6d %-8d %-24s %-14.6g %-12.4g %d(%d)\n",
                a.cell.n_actions, a.cell.n_samples, a.cell.embedding_dims,
                a.cell.hidden_dims, a.cell.embedding_size, a.estimator.c_str(),
                a.mse_mean, a.mse_stderr, a.runs, a.failed);
  }
}

int RunKind(ExperimentKind kind, const Flags& f) {
  const ExperimentSpec spec = BuildSpec(kind, f);
  const embope::ExperimentResult result = embope::run_experiment(spec);
  std::vector<embope::RelativeCdf> cdfs;
  if (kind == ExperimentKind::kRealProtocol) {
    try {
      cdfs = embope::relative_mse_cdf(result.runs, result.estimators);
    } catch (const embope::Error&) {
      embope::emit_outputs(spec.output_dir, result);
      throw;
    }
  }
  embope::emit_outputs(spec.output_dir, result, cdfs);
  PrintAggregates(result);
  for (const auto& cdf : cdfs) {
    std::printf("CDF(1.0) %-24s %.4f\n", cdf.estimator.c_str(),
                embope::cdf_at(cdf, 1.0));
  }
  std::printf("wrote %s\n", spec.output_dir.c_str());
  return 0;
}

int RunCdf(const Flags& f) {
  std::vector<embope::RunRecord> runs = embope::read_runs_csv(f.runs_csv);
  std::vector<std::string> order;
  for (const auto& r : runs) {
    if (std::find(order.begin(), order.end(), r.estimator) == order.end()) {
      order.push_back(r.estimator);
    }
  }
  if (f.estimators) {
    const std::vector<std::string> keep = SplitList(*f.estimators);
    std::erase_if(runs, [&](const embope::RunRecord& r) {
      return r.estimator != f.reference &&
             std::find(keep.begin(), keep.end(), r.estimator) == keep.end();
    });
  }
  const std::vector<embope::RelativeCdf> cdfs =
      embope::relative_mse_cdf(runs, order, f.reference);
  const std::filesystem::path dir = f.out.value_or("results");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw embope::IoError("cannot create " + dir.string());
  embope::write_cdf_csv((dir / "cdf.csv").string(), cdfs);
  embope::write_cdf_summary_csv((dir / "cdf_summary.csv").string(), cdfs);
  embope::write_plot_data_csv((dir / "plot_data.csv").string(),
                              embope::ExperimentResult{}, cdfs);
  for (const auto& cdf : cdfs) {
    std::printf("CDF(1.0) %-24s %.4f\n", cdf.estimator.c_str(),
                embope::cdf_at(cdf, 1.0));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Off-policy evaluation with learned action embeddings"};
  app.require_subcommand(1);
  Flags flags;
  struct Sub {
    const char* name;
    const char* help;
    ExperimentKind kind;
  };
  const Sub subs[] = {
      {"toy", "Logistic toy problem with context-free logging",
       ExperimentKind::kToy},
      {"synth", "Synthetic grid over |A| and n", ExperimentKind::kSynthGrid},
      {"hidden-dims", "Unobserved embedding dimensions",
       ExperimentKind::kHiddenDims},
      {"embed-size", "Learned embedding size ablation",
       ExperimentKind::kEmbedSize},
      {"real", "Bootstrap protocol on a logged-data CSV",
       ExperimentKind::kRealProtocol},
  };
  std::vector<std::pair<CLI::App*, ExperimentKind>> kinds;
  for (const Sub& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    AddExperimentFlags(sub, flags, s.kind == ExperimentKind::kRealProtocol);
    kinds.emplace_back(sub, s.kind);
  }
  CLI::App* cdf = app.add_subcommand("cdf", "Relative-MSE CDFs of a runs.csv");
  cdf->add_option("--runs-csv", flags.runs_csv, "runs.csv to read")
      ->required();
  cdf->add_option("--out", flags.out, "Output directory");
  cdf->add_option("--estimators", flags.estimators, "Estimators to keep");
  cdf->add_option("--reference", flags.reference, "Reference estimator");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cdf->parsed()) return RunCdf(flags);
    for (const auto& [sub, kind] : kinds) {
      if (sub->parsed()) return RunKind(kind, flags);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}

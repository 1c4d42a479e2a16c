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

#include "embope/bench/experiment.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include "embope/bench/csv_io.h"
#include "embope/errors.h"
#include "embope/sampling.h"
#include "json.hpp"

namespace embope {
namespace {

using nlohmann::json;

constexpr double kDefaultSwitchTaus[] = {5.0, 10.0, 50.0, 100.0};
constexpr const char* kSwitchPrefix = "switch_dr_tau";

const std::set<std::string>& PlainEstimators() {
  static const std::set<std::string> names = {
      "ips",        "snips",      "dm",
      "dr",         "mips",       "mips_true",
      "mips_slope", "learned_mips_onehot", "learned_mips_finetune",
      "learned_mips_combined"};
  return names;
}

// tau of a "switch_dr_tau<T>" name, or nothing.
std::optional<double> SwitchTau(const std::string& name) {
  if (name.rfind(kSwitchPrefix, 0) != 0) return std::nullopt;
  const std::string digits = name.substr(std::string(kSwitchPrefix).size());
  if (digits.empty()) return std::nullopt;
  char* end = nullptr;
  const double tau = std::strtod(digits.c_str(), &end);
  if (end != digits.c_str() + digits.size() || !(tau > 0.0) ||
      !std::isfinite(tau)) {
    return std::nullopt;
  }
  return tau;
}

bool NeedsEmbeddings(const std::string& name) {
  return name == "mips" || name == "mips_true" || name == "mips_slope" ||
         name == "learned_mips_finetune" || name == "learned_mips_combined";
}

std::string FormatTau(double tau) {
  std::ostringstream ss;
  ss << tau;
  return ss.str();
}

template <typename Fn>
void ParallelFor(int count, int workers, const Fn& fn) {
  workers = std::max(1, std::min(workers, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

// Everything one run needs, shared by every cell evaluated on its data.
struct RunContext {
  std::string experiment;
  int run = 0;
  std::uint64_t seed = 0;
  int n_actions = 0;
  int n_samples = 0;
  int embedding_dims = 0;
  std::optional<LoggedDataset> data;
  std::optional<PolicyMatrix> target;
  double true_value = 0.0;
  std::optional<SynthEnvironment> env;
  const CategoricalEmbeddingTable* table = nullptr;
  TrainConfig train;
  MipsConfig mips;
  bool intercept_context = true;
};

// Evaluates estimator names over the (hidden dims, embedding size) cells of a
// run, sharing every intermediate that does not depend on an axis.
class RunEvaluator {
 public:
  explicit RunEvaluator(const RunContext& ctx) : ctx_(ctx) {}

  double Evaluate(const std::string& name, int hidden, int size) {
    const auto key = std::make_tuple(name, DependsOnHidden(name) ? hidden : -1,
                                     DependsOnSize(name) ? size : -1);
    auto it = cache_.find(key);
    if (it == cache_.end()) {
      Outcome outcome;
      try {
        outcome.value = Compute(name, hidden, size);
      } catch (const std::exception& e) {
        outcome.error = e.what();
      }
      it = cache_.emplace(key, std::move(outcome)).first;
    }
    if (!it->second.error.empty()) throw Error(it->second.error);
    return it->second.value;
  }

 private:
  struct Outcome {
    double value = 0.0;
    std::string error;
  };

  static bool DependsOnHidden(const std::string& name) {
    return NeedsEmbeddings(name);
  }
  static bool DependsOnSize(const std::string& name) {
    return name == "dm" || name == "dr" || SwitchTau(name).has_value() ||
           name.rfind("learned_mips", 0) == 0;
  }

  const LoggedDataset& Data(int hidden) {
    if (hidden == 0) return *ctx_.data;
    auto it = masked_.find(hidden);
    if (it != masked_.end()) return it->second;
    const LoggedDataset& full = *ctx_.data;
    if (!full.has_embeddings()) {
      throw ParameterError("data has no embeddings to hide");
    }
    const int observed =
        static_cast<int>(full.observed_embeddings().cols()) - hidden;
    if (observed < 1) throw ParameterError("cannot hide every dimension");
    CodeMatrix codes = full.observed_embeddings().leftCols(observed);
    std::vector<int> cards(full.embedding_cardinalities().begin(),
                           full.embedding_cardinalities().begin() + observed);
    return masked_
        .emplace(hidden, full.WithEmbeddings(std::move(codes), std::move(cards)))
        .first->second;
  }

  const CategoricalEmbeddingTable* Table(int hidden) {
    if (ctx_.table == nullptr) return nullptr;
    if (hidden == 0) return ctx_.table;
    auto it = tables_.find(hidden);
    if (it == tables_.end()) {
      std::vector<int> dims(static_cast<size_t>(ctx_.table->dims() - hidden));
      for (size_t k = 0; k < dims.size(); ++k) dims[k] = static_cast<int>(k);
      it = tables_.emplace(hidden, ctx_.table->SelectDims(dims)).first;
    }
    return &it->second;
  }

  const RewardModel& Model(InputRepr repr, int hidden, int size) {
    if (repr == InputRepr::kOneHot) hidden = 0;
    const auto key = std::make_tuple(static_cast<int>(repr), hidden, size);
    auto it = models_.find(key);
    if (it == models_.end()) {
      TrainConfig cfg = ctx_.train;
      cfg.embedding_size = size;
      it = models_
               .emplace(key, train_reward_model(Data(hidden), repr, cfg,
                                                Table(hidden)))
               .first;
    }
    return it->second;
  }

  const Matrix& QHat(int size) {
    auto it = q_hat_.find(size);
    if (it == q_hat_.end()) {
      it = q_hat_
               .emplace(size, predict_all(Model(InputRepr::kOneHot, 0, size),
                                          ctx_.data->contexts()))
               .first;
    }
    return it->second;
  }

  double Compute(const std::string& name, int hidden, int size) {
    const LoggedDataset& data = *ctx_.data;
    const PolicyMatrix& target = *ctx_.target;
    if (name == "ips") return ips(data, target).estimate;
    if (name == "snips") return snips(data, target).estimate;
    if (name == "dm") return dm(data, target, QHat(size)).estimate;
    if (name == "dr") return dr(data, target, QHat(size)).estimate;
    if (auto tau = SwitchTau(name)) {
      return switch_dr(data, target, QHat(size), *tau).estimate;
    }
    if (name == "mips") return mips(Data(hidden), target, ctx_.mips).estimate;
    if (name == "mips_true") {
      if (!ctx_.env) {
        throw ParameterError("mips_true needs a synthetic environment");
      }
      return mips_true(*ctx_.env, Data(hidden), target).estimate;
    }
    if (name == "mips_slope") {
      const LoggedDataset& d = Data(hidden);
      if (!d.has_embeddings()) throw ParameterError("data has no embeddings");
      return mips_slope(d, target, d.observed_embeddings(),
                        d.embedding_cardinalities(), ctx_.mips)
          .first.estimate;
    }
    if (name == "learned_mips_onehot") {
      return learned_mips(data, target, Model(InputRepr::kOneHot, 0, size),
                          ctx_.mips)
          .estimate;
    }
    if (name == "learned_mips_finetune" || name == "learned_mips_combined") {
      const InputRepr repr = name == "learned_mips_finetune"
                                 ? InputRepr::kPredefined
                                 : InputRepr::kCombined;
      return learned_mips(Data(hidden), target, Model(repr, hidden, size),
                          ctx_.mips, Table(hidden))
          .estimate;
    }
    throw ParameterError("unknown estimator " + name);
  }

  const RunContext& ctx_;
  std::map<std::tuple<std::string, int, int>, Outcome> cache_;
  std::map<int, LoggedDataset> masked_;
  std::map<int, CategoricalEmbeddingTable> tables_;
  std::map<std::tuple<int, int, int>, RewardModel> models_;
  std::map<int, Matrix> q_hat_;
};

// Records for every (hidden, size, estimator) combination of one run. A
// failure while preparing the run marks every record failed.
std::vector<RunRecord> EvaluateRun(
    const std::function<void(RunContext&)>& prepare, RunContext ctx,
    const std::vector<int>& hidden_dims, const std::vector<int>& sizes,
    const std::vector<std::string>& estimators) {
  std::string setup_error;
  try {
    prepare(ctx);
    if (ctx.intercept_context) {
      ctx.data.emplace(
          ctx.data->WithContexts(with_intercept_column(ctx.data->contexts())));
    }
  } catch (const std::exception& e) {
    setup_error = e.what();
    if (setup_error.empty()) setup_error = "run setup failed";
  }
  std::optional<RunEvaluator> evaluator;
  if (setup_error.empty()) evaluator.emplace(ctx);

  std::vector<RunRecord> out;
  for (int h : hidden_dims) {
    for (int s : sizes) {
      for (const std::string& name : estimators) {
        RunRecord rec;
        rec.experiment = ctx.experiment;
        rec.cell = {ctx.n_actions, ctx.n_samples, ctx.embedding_dims, h, s};
        rec.run = ctx.run;
        rec.seed = ctx.seed;
        rec.estimator = name;
        rec.true_value = ctx.true_value;
        if (!setup_error.empty()) {
          rec.ok = false;
          rec.error = setup_error;
        } else {
          try {
            rec.estimate = evaluator->Evaluate(name, h, s);
            if (!std::isfinite(rec.estimate)) {
              throw DegenerateInputError("non-finite estimate");
            }
            const double diff = rec.estimate - rec.true_value;
            rec.squared_error = diff * diff;
          } catch (const std::exception& e) {
            rec.ok = false;
            rec.error = e.what();
          }
        }
        if (!rec.ok) {
          rec.estimate = std::numeric_limits<double>::quiet_NaN();
          rec.squared_error = std::numeric_limits<double>::quiet_NaN();
        }
        out.push_back(std::move(rec));
      }
    }
  }
  return out;
}

SeededRng RunSeeds(std::uint64_t master, int n_actions, int n_samples,
                   int emb_dims, int run) {
  return SeededRng(master)
      .Child("actions", static_cast<std::uint64_t>(n_actions))
      .Child("samples", static_cast<std::uint64_t>(n_samples))
      .Child("emb_dims", static_cast<std::uint64_t>(emb_dims))
      .Child("run", static_cast<std::uint64_t>(run));
}

double ReadTruthJson(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ParameterError(path + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("policy_value") ||
      !doc["policy_value"].is_number()) {
    throw ParameterError(path + ": expected a numeric \"policy_value\"");
  }
  return doc["policy_value"].get<double>();
}

std::vector<RunRecord> RunToy(const ExperimentSpec& spec,
                              const std::vector<std::string>& estimators,
                              int workers) {
  struct Job {
    int n_actions, n_samples, run;
  };
  std::vector<Job> jobs;
  for (int a : spec.action_counts)
    for (int n : spec.sample_sizes)
      for (int r = 0; r < spec.runs; ++r) jobs.push_back({a, n, r});

  std::vector<std::vector<RunRecord>> results(jobs.size());
  ParallelFor(static_cast<int>(jobs.size()), workers, [&](int i) {
    const Job& job = jobs[i];
    const SeededRng seeds = RunSeeds(spec.seed, job.n_actions, job.n_samples,
                                     0, job.run);
    RunContext ctx;
    ctx.experiment = ExperimentKindName(spec.kind);
    ctx.run = job.run;
    ctx.seed = seeds.master_seed();
    ctx.n_actions = job.n_actions;
    ctx.n_samples = job.n_samples;
    ctx.train = spec.train;
    ctx.train.seed = seeds.Derive("reward_model");
    ctx.mips = spec.mips;
    ctx.intercept_context = spec.UsesInterceptContext();
    auto prepare = [&](RunContext& c) {
      // A new reward function every toy_datasets_per_function runs.
      const int function = job.run / spec.toy_datasets_per_function;
      ToyConfig cfg = spec.toy;
      cfg.n_actions = job.n_actions;
      cfg.seed = SeededRng(spec.seed)
                     .Child("toy_actions",
                            static_cast<std::uint64_t>(job.n_actions))
                     .Derive("function", static_cast<std::uint64_t>(function));
      const ToyEnvironment env = build_toy(cfg);
      RngStream data_rng = seeds.Stream("data");
      c.data.emplace(sample_toy_logged_data(env, job.n_samples, data_rng));
      c.target.emplace(uniform_policy(job.n_samples, job.n_actions));
      c.true_value = toy_true_value(
          env, Vector::Constant(job.n_actions, 1.0 / job.n_actions));
    };
    results[i] = EvaluateRun(prepare, std::move(ctx), {0},
                             spec.embedding_sizes, estimators);
  });
  std::vector<RunRecord> out;
  for (auto& r : results)
    for (auto& rec : r) out.push_back(std::move(rec));
  return out;
}

std::vector<RunRecord> RunSynth(const ExperimentSpec& spec,
                                const std::vector<std::string>& estimators,
                                int workers) {
  struct Job {
    int n_actions, n_samples, emb_dims, run;
  };
  std::vector<Job> jobs;
  for (int a : spec.action_counts)
    for (int n : spec.sample_sizes)
      for (int d : spec.embedding_dims)
        for (int r = 0; r < spec.runs; ++r) jobs.push_back({a, n, d, r});

  std::vector<std::vector<RunRecord>> results(jobs.size());
  ParallelFor(static_cast<int>(jobs.size()), workers, [&](int i) {
    const Job& job = jobs[i];
    const SeededRng seeds = RunSeeds(spec.seed, job.n_actions, job.n_samples,
                                     job.emb_dims, job.run);
    RunContext ctx;
    ctx.experiment = ExperimentKindName(spec.kind);
    ctx.run = job.run;
    ctx.seed = seeds.master_seed();
    ctx.n_actions = job.n_actions;
    ctx.n_samples = job.n_samples;
    ctx.embedding_dims = job.emb_dims;
    ctx.train = spec.train;
    ctx.train.seed = seeds.Derive("reward_model");
    ctx.mips = spec.mips;
    ctx.intercept_context = spec.UsesInterceptContext();
    auto prepare = [&](RunContext& c) {
      SynthConfig cfg = spec.synth;
      cfg.n_actions = job.n_actions;
      cfg.embedding_dims = job.emb_dims;
      cfg.hidden_dims = 0;
      cfg.seed = seeds.Derive("env");
      c.env.emplace(build_env(cfg));
      RngStream data_rng = seeds.Stream("data");
      c.data.emplace(sample_logged_data(*c.env, job.n_samples, data_rng));
      c.target.emplace(target_policy(*c.env, c.data->contexts()));
      RngStream truth_rng = seeds.Stream("truth");
      const Matrix contexts =
          sample_contexts(spec.truth_contexts, cfg.context_dim, truth_rng);
      const double eps = cfg.epsilon;
      c.true_value = true_policy_value(
          *c.env, contexts,
          [eps](const Matrix& q) { return epsilon_greedy_policy(q, eps); });
    };
    std::vector<int> hidden;
    for (int h : spec.hidden_dims)
      if (h < job.emb_dims) hidden.push_back(h);
    results[i] = EvaluateRun(prepare, std::move(ctx), hidden,
                             spec.embedding_sizes, estimators);
  });
  std::vector<RunRecord> out;
  for (auto& r : results)
    for (auto& rec : r) out.push_back(std::move(rec));
  return out;
}

std::vector<RunRecord> RunReal(const ExperimentSpec& spec,
                               const std::vector<std::string>& estimators,
                               int workers) {
  CsvSchemaOptions schema;
  schema.n_actions = spec.real.n_actions;
  const LoadedLog log = load_logged_csv(spec.real.data_path, schema);
  const LoggedDataset& full = log.data;
  if (!full.has_logging_policy()) {
    throw ParameterError(
        "the pscore column does not determine a context-free logging "
        "distribution");
  }
  const Vector target_probs =
      load_action_distribution_csv(spec.real.target_path, full.n_actions());
  const double truth = spec.real.true_value
                           ? *spec.real.true_value
                           : ReadTruthJson(spec.real.truth_path);
  const int size = spec.real.bootstrap_size;
  const int emb_dims =
      full.has_embeddings()
          ? static_cast<int>(full.observed_embeddings().cols())
          : 0;
  std::vector<int> hidden;
  for (int h : spec.hidden_dims)
    if (h == 0 || h < emb_dims) hidden.push_back(h);

  std::vector<std::vector<RunRecord>> results(static_cast<size_t>(spec.runs));
  ParallelFor(spec.runs, workers, [&](int b) {
    const SeededRng seeds =
        RunSeeds(spec.seed, full.n_actions(), size, emb_dims, b);
    RunContext ctx;
    ctx.experiment = ExperimentKindName(spec.kind);
    ctx.run = b;
    ctx.seed = seeds.master_seed();
    ctx.n_actions = full.n_actions();
    ctx.n_samples = size;
    ctx.embedding_dims = emb_dims;
    ctx.true_value = truth;
    ctx.table = log.table ? &*log.table : nullptr;
    ctx.train = spec.train;
    ctx.train.seed = seeds.Derive("reward_model");
    ctx.mips = spec.mips;
    ctx.intercept_context = spec.UsesInterceptContext();
    auto prepare = [&](RunContext& c) {
      RngStream rng = seeds.Stream("bootstrap");
      c.data.emplace(bootstrap_sample(full, size, rng));
      c.target.emplace(broadcast_policy(target_probs, size));
    };
    results[b] = EvaluateRun(prepare, std::move(ctx), hidden,
                             spec.embedding_sizes, estimators);
  });
  std::vector<RunRecord> out;
  for (auto& r : results)
    for (auto& rec : r) out.push_back(std::move(rec));
  return out;
}

// json helpers
std::vector<int> IntList(const json& v, const std::string& key) {
  std::vector<int> out;
  if (v.is_number_integer()) {
    out.push_back(v.get<int>());
  } else if (v.is_array()) {
    for (const auto& x : v) {
      if (!x.is_number_integer()) {
        throw ParameterError("config key '" + key + "' must hold integers");
      }
      out.push_back(x.get<int>());
    }
  } else {
    throw ParameterError("config key '" + key +
                         "' must be an integer or a list of integers");
  }
  return out;
}

double Number(const json& v, const std::string& key) {
  if (!v.is_number()) {
    throw ParameterError("config key '" + key + "' must be a number");
  }
  return v.get<double>();
}

int Integer(const json& v, const std::string& key) {
  if (!v.is_number_integer()) {
    throw ParameterError("config key '" + key + "' must be an integer");
  }
  return v.get<int>();
}

std::string String(const json& v, const std::string& key) {
  if (!v.is_string()) {
    throw ParameterError("config key '" + key + "' must be a string");
  }
  return v.get<std::string>();
}

bool Bool(const json& v, const std::string& key) {
  if (!v.is_boolean()) {
    throw ParameterError("config key '" + key + "' must be a boolean");
  }
  return v.get<bool>();
}

void ForEachKey(const json& obj, const std::string& where,
                const std::function<bool(const std::string&, const json&)>&
                    handle) {
  if (!obj.is_object()) {
    throw ParameterError("config section '" + where + "' must be an object");
  }
  for (const auto& [key, value] : obj.items()) {
    if (!handle(key, value)) {
      throw ParameterError("unknown config key '" +
                           (where.empty() ? key : where + "." + key) + "'");
    }
  }
}

std::vector<std::string> SplitNames(const std::string& s) {
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

double Sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

const char* ExperimentKindName(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kToy:
      return "toy";
    case ExperimentKind::kSynthGrid:
      return "synth";
    case ExperimentKind::kHiddenDims:
      return "hidden-dims";
    case ExperimentKind::kEmbedSize:
      return "embed-size";
    case ExperimentKind::kRealProtocol:
      return "real";
  }
  return "unknown";
}

ExperimentKind ParseExperimentKind(const std::string& name) {
  for (ExperimentKind k :
       {ExperimentKind::kToy, ExperimentKind::kSynthGrid,
        ExperimentKind::kHiddenDims, ExperimentKind::kEmbedSize,
        ExperimentKind::kRealProtocol}) {
    if (name == ExperimentKindName(k)) return k;
  }
  throw ParameterError("unknown experiment kind '" + name + "'");
}

std::vector<std::string> DefaultEstimators(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kToy:
      return {"ips", "dm", "learned_mips_onehot"};
    case ExperimentKind::kSynthGrid:
      return {"ips",  "snips", "dm",  "dr", "switch_dr", "mips", "mips_true",
              "learned_mips_onehot", "learned_mips_finetune",
              "learned_mips_combined"};
    case ExperimentKind::kHiddenDims:
      return {"ips", "mips", "mips_true", "mips_slope", "learned_mips_onehot",
              "learned_mips_finetune", "learned_mips_combined"};
    case ExperimentKind::kEmbedSize:
      return {"ips", "dm", "learned_mips_onehot"};
    case ExperimentKind::kRealProtocol:
      return {"ips", "snips", "dm", "dr", "mips", "mips_slope",
              "learned_mips_onehot", "learned_mips_finetune",
              "learned_mips_combined"};
  }
  return {};
}

std::vector<std::string> ExpandEstimatorNames(
    const std::vector<std::string>& names) {
  std::vector<std::string> out;
  auto add = [&](const std::string& n) {
    if (std::find(out.begin(), out.end(), n) == out.end()) out.push_back(n);
  };
  for (const std::string& name : names) {
    if (name == "switch_dr") {
      for (double tau : kDefaultSwitchTaus) {
        add(kSwitchPrefix + FormatTau(tau));
      }
    } else if (name == "learned_mips") {
      add("learned_mips_onehot");
    } else if (PlainEstimators().count(name)) {
      add(name);
    } else if (auto tau = SwitchTau(name)) {
      add(kSwitchPrefix + FormatTau(*tau));
    } else {
      throw ParameterError("unknown estimator '" + name + "'");
    }
  }
  return out;
}

void ExperimentSpec::Validate() const {
  if (runs < 1) throw ParameterError("runs must be >= 1");
  if (workers < 0) throw ParameterError("workers must be >= 0");
  if (embedding_sizes.empty() || hidden_dims.empty()) {
    throw ParameterError("grid axes must be non-empty");
  }
  for (int s : embedding_sizes) {
    if (s < 0) throw ParameterError("embedding sizes must be >= 0");
  }
  for (int h : hidden_dims) {
    if (h < 0) throw ParameterError("hidden dims must be >= 0");
  }
  const std::vector<std::string> names =
      ExpandEstimatorNames(estimators.empty() ? DefaultEstimators(kind)
                                              : estimators);
  if (names.empty()) throw ParameterError("no estimators requested");
  train.Validate();
  mips.Validate();
  switch (kind) {
    case ExperimentKind::kToy:
      toy.Validate();
      if (toy_datasets_per_function < 1) {
        throw ParameterError("toy_datasets_per_function must be >= 1");
      }
      for (const auto& n : names) {
        if (NeedsEmbeddings(n)) {
          throw ParameterError("estimator " + n +
                               " needs embeddings, which the toy data lacks");
        }
      }
      [[fallthrough]];
    case ExperimentKind::kSynthGrid:
    case ExperimentKind::kHiddenDims:
    case ExperimentKind::kEmbedSize:
      if (action_counts.empty() || sample_sizes.empty() ||
          embedding_dims.empty()) {
        throw ParameterError("grid axes must be non-empty");
      }
      for (int a : action_counts)
        if (a < 1) throw ParameterError("action counts must be >= 1");
      for (int n : sample_sizes)
        if (n < 1) throw ParameterError("sample sizes must be >= 1");
      if (kind != ExperimentKind::kToy) {
        for (int d : embedding_dims) {
          SynthConfig cfg = synth;
          cfg.embedding_dims = d;
          cfg.n_actions = action_counts.front();
          cfg.hidden_dims = 0;
          cfg.Validate();
          if (std::none_of(hidden_dims.begin(), hidden_dims.end(),
                           [d](int h) { return h < d; })) {
            throw ParameterError("every hidden-dims value hides all " +
                                 std::to_string(d) + " dimensions");
          }
        }
        if (truth_contexts < 1) {
          throw ParameterError("truth_contexts must be >= 1");
        }
      }
      break;
    case ExperimentKind::kRealProtocol:
      if (real.data_path.empty() || real.target_path.empty()) {
        throw ParameterError("real protocol needs data and target files");
      }
      if (!real.true_value && real.truth_path.empty()) {
        throw ParameterError("real protocol needs a true policy value");
      }
      if (real.bootstrap_size < 1) {
        throw ParameterError("bootstrap size must be >= 1");
      }
      for (const auto& n : names) {
        if (n == "mips_true") {
          throw ParameterError("mips_true needs a synthetic environment");
        }
      }
      break;
  }
}

int default_worker_count() {
  if (const char* env = std::getenv("EMBOPE_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<int>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::vector<AggregateRecord> aggregate(
    const std::vector<RunRecord>& runs,
    const std::vector<std::string>& estimator_order) {
  std::map<std::string, int> rank;
  for (size_t i = 0; i < estimator_order.size(); ++i) {
    rank.emplace(estimator_order[i], static_cast<int>(i));
  }
  auto order_of = [&](const std::string& name) {
    auto it = rank.find(name);
    return it == rank.end() ? static_cast<int>(rank.size()) : it->second;
  };
  using Key = std::tuple<std::string, CellCoordinates, int, std::string>;
  std::map<Key, std::vector<const RunRecord*>> groups;
  for (const RunRecord& r : runs) {
    groups[{r.experiment, r.cell, order_of(r.estimator), r.estimator}]
        .push_back(&r);
  }
  std::vector<AggregateRecord> out;
  for (const auto& [key, members] : groups) {
    AggregateRecord agg;
    agg.experiment = std::get<0>(key);
    agg.cell = std::get<1>(key);
    agg.estimator = std::get<3>(key);
    double sum = 0.0;
    for (const RunRecord* r : members) {
      if (r->ok) {
        sum += r->squared_error;
        ++agg.runs;
      } else {
        ++agg.failed;
      }
    }
    if (agg.runs > 0) {
      agg.mse_mean = sum / agg.runs;
    } else {
      agg.mse_mean = std::numeric_limits<double>::quiet_NaN();
    }
    if (agg.runs > 1) {
      double ss = 0.0;
      for (const RunRecord* r : members) {
        if (!r->ok) continue;
        const double d = r->squared_error - agg.mse_mean;
        ss += d * d;
      }
      agg.mse_stderr = std::sqrt(ss / (agg.runs - 1)) / std::sqrt(agg.runs);
    }
    out.push_back(std::move(agg));
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.Validate();
  ExperimentResult result;
  result.experiment = ExperimentKindName(spec.kind);
  result.estimators = ExpandEstimatorNames(
      spec.estimators.empty() ? DefaultEstimators(spec.kind) : spec.estimators);
  const int workers =
      spec.workers > 0 ? spec.workers : default_worker_count();
  switch (spec.kind) {
    case ExperimentKind::kToy:
      result.runs = RunToy(spec, result.estimators, workers);
      break;
    case ExperimentKind::kSynthGrid:
    case ExperimentKind::kHiddenDims:
    case ExperimentKind::kEmbedSize:
      result.runs = RunSynth(spec, result.estimators, workers);
      break;
    case ExperimentKind::kRealProtocol:
      result.runs = RunReal(spec, result.estimators, workers);
      break;
  }
  std::map<std::string, int> rank;
  for (size_t i = 0; i < result.estimators.size(); ++i) {
    rank.emplace(result.estimators[i], static_cast<int>(i));
  }
  std::stable_sort(result.runs.begin(), result.runs.end(),
                   [&](const RunRecord& a, const RunRecord& b) {
                     return std::tie(a.cell, a.run, rank[a.estimator]) <
                            std::tie(b.cell, b.run, rank[b.estimator]);
                   });
  result.aggregates = aggregate(result.runs, result.estimators);
  return result;
}

void apply_json_config(const std::string& json_text, ExperimentSpec& spec) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ParameterError(std::string("invalid JSON config: ") + e.what());
  }
  ForEachKey(doc, "", [&](const std::string& key, const json& v) {
    if (key == "actions") {
      spec.action_counts = IntList(v, key);
    } else if (key == "samples") {
      spec.sample_sizes = IntList(v, key);
    } else if (key == "emb_dims") {
      spec.embedding_dims = IntList(v, key);
    } else if (key == "hide_dims") {
      spec.hidden_dims = IntList(v, key);
    } else if (key == "emb_sizes") {
      spec.embedding_sizes = IntList(v, key);
    } else if (key == "estimators") {
      if (v.is_string()) {
        spec.estimators = SplitNames(v.get<std::string>());
      } else if (v.is_array()) {
        spec.estimators.clear();
        for (const auto& x : v) spec.estimators.push_back(String(x, key));
      } else {
        throw ParameterError("config key 'estimators' must be a list");
      }
    } else if (key == "runs") {
      spec.runs = Integer(v, key);
    } else if (key == "seed") {
      if (!v.is_number_unsigned() && !v.is_number_integer()) {
        throw ParameterError("config key 'seed' must be an integer");
      }
      spec.seed = v.get<std::uint64_t>();
    } else if (key == "out") {
      spec.output_dir = String(v, key);
    } else if (key == "workers") {
      spec.workers = Integer(v, key);
    } else if (key == "truth_contexts") {
      spec.truth_contexts = Integer(v, key);
    } else if (key == "intercept") {
      spec.intercept_context = Bool(v, key);
    } else if (key == "toy_datasets_per_function") {
      spec.toy_datasets_per_function = Integer(v, key);
    } else if (key == "synth") {
      ForEachKey(v, key, [&](const std::string& k, const json& x) {
        SynthConfig& s = spec.synth;
        if (k == "context_dim") s.context_dim = Integer(x, k);
        else if (k == "cardinality") s.cardinality = Integer(x, k);
        else if (k == "beta") s.beta = Number(x, k);
        else if (k == "epsilon") s.epsilon = Number(x, k);
        else if (k == "noise_sd") s.reward_noise_sd = Number(x, k);
        else if (k == "reward") {
          const std::string kind = String(x, k);
          if (kind == "linear") s.reward_kind = RewardKind::kLinear;
          else if (kind == "neural") s.reward_kind = RewardKind::kNeural;
          else throw ParameterError("synth.reward must be linear or neural");
        } else if (k == "neural_width") s.neural_width = Integer(x, k);
        else if (k == "monte_carlo_draws") s.monte_carlo_draws = Integer(x, k);
        else return false;
        return true;
      });
    } else if (key == "toy") {
      ForEachKey(v, key, [&](const std::string& k, const json& x) {
        if (k == "context_dim") spec.toy.context_dim = Integer(x, k);
        else if (k == "noise_sd") spec.toy.noise_sd = Number(x, k);
        else return false;
        return true;
      });
    } else if (key == "train") {
      ForEachKey(v, key, [&](const std::string& k, const json& x) {
        TrainConfig& t = spec.train;
        if (k == "learning_rate") t.learning_rate = Number(x, k);
        else if (k == "epochs") t.epochs = Integer(x, k);
        else if (k == "batch_size") t.batch_size = Integer(x, k);
        else if (k == "l2") t.l2 = Number(x, k);
        else if (k == "use_bias") t.use_bias = Bool(x, k);
        else if (k == "init_sd") t.init_sd = Number(x, k);
        else if (k == "lr_decay") t.lr_decay = Number(x, k);
        else return false;
        return true;
      });
    } else if (key == "mips") {
      ForEachKey(v, key, [&](const std::string& k, const json& x) {
        MultinomialOptions& m = spec.mips.classifier;
        if (k == "l2") m.l2 = Number(x, k);
        else if (k == "max_iters") m.max_iters = Integer(x, k);
        else if (k == "history") m.history = Integer(x, k);
        else if (k == "propensity_floor") spec.mips.propensity_floor = Number(x, k);
        else if (k == "context_features") spec.mips.context_features = Bool(x, k);
        else return false;
        return true;
      });
    } else if (key == "real") {
      ForEachKey(v, key, [&](const std::string& k, const json& x) {
        RealProtocolOptions& r = spec.real;
        if (k == "data") r.data_path = String(x, k);
        else if (k == "target") r.target_path = String(x, k);
        else if (k == "truth") r.truth_path = String(x, k);
        else if (k == "true_value") r.true_value = Number(x, k);
        else if (k == "bootstrap_size") r.bootstrap_size = Integer(x, k);
        else if (k == "n_actions") r.n_actions = Integer(x, k);
        else return false;
        return true;
      });
    } else {
      return false;
    }
    return true;
  });
}

RealProtocolOptions make_real_standin(const std::string& dir, int n_rows,
                                      std::uint64_t seed) {
  if (n_rows < 1) throw ParameterError("n_rows must be >= 1");
  constexpr int kActions = 240;
  constexpr int kContextDim = 10;
  const std::vector<int> cards = {24, 10, 6, 4};
  const int dims = static_cast<int>(cards.size());
  const SeededRng seeds(seed);

  // Per-action codes, per-category bias and context weights.
  CodeMatrix codes(kActions, dims);
  {
    RngStream rng = seeds.Stream("codes");
    for (int a = 0; a < kActions; ++a)
      for (int k = 0; k < dims; ++k)
        codes(a, k) = std::min(
            cards[k] - 1, static_cast<int>(rng.NextUniform() * cards[k]));
  }
  std::vector<Vector> category_bias;
  std::vector<Matrix> category_weights;
  for (int k = 0; k < dims; ++k) {
    RngStream rng = seeds.Stream("category", static_cast<std::uint64_t>(k));
    category_bias.push_back(0.5 * SampleStandardNormal(rng, cards[k], 1).col(0));
    category_weights.push_back(0.3 *
                               SampleStandardNormal(rng, cards[k], kContextDim));
  }
  Vector action_bias;
  {
    RngStream rng = seeds.Stream("action_bias");
    action_bias = 0.1 * SampleStandardNormal(rng, kActions, 1).col(0) -
                  Vector::Constant(kActions, 1.5);
  }
  Matrix weights = Matrix::Zero(kActions, kContextDim);
  Vector bias = action_bias;
  for (int a = 0; a < kActions; ++a) {
    for (int k = 0; k < dims; ++k) {
      bias[a] += category_bias[k][codes(a, k)];
      weights.row(a) += category_weights[k].row(codes(a, k));
    }
  }
  Vector values(kActions);
  for (int a = 0; a < kActions; ++a) {
    values[a] = gaussian_sigmoid_mean(bias[a], weights.row(a).norm());
  }
  // Context-free target concentrated on the better actions.
  Vector target = (8.0 * (values.array() - values.maxCoeff())).exp();
  target /= target.sum();
  const double truth = target.dot(values);

  RngStream rng = seeds.Stream("rows");
  Matrix contexts = SampleStandardNormal(rng, n_rows, kContextDim);
  std::vector<int> actions(static_cast<size_t>(n_rows));
  Vector rewards(n_rows);
  for (int t = 0; t < n_rows; ++t) {
    const int a = std::min(kActions - 1,
                           static_cast<int>(rng.NextUniform() * kActions));
    actions[t] = a;
    const double p = Sigmoid(bias[a] + contexts.row(t).dot(weights.row(a)));
    rewards[t] = rng.NextUniform() < p ? 1.0 : 0.0;
  }
  CategoricalEmbeddingTable table(codes, cards);
  LoggedDataset data(std::move(contexts), actions, std::move(rewards),
                     Vector::Constant(n_rows, 1.0 / kActions), kActions,
                     table.ForActions(actions), cards);

  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir + ": " + ec.message());
  RealProtocolOptions out;
  out.data_path = (std::filesystem::path(dir) / "logged.csv").string();
  out.target_path = (std::filesystem::path(dir) / "target.csv").string();
  out.truth_path = (std::filesystem::path(dir) / "truth.json").string();
  out.n_actions = kActions;
  write_logged_csv(out.data_path, data);
  write_action_distribution_csv(out.target_path, target);
  std::ofstream truth_file(out.truth_path, std::ios::binary);
  if (!truth_file) throw IoError("cannot write " + out.truth_path);
  truth_file << "{\"policy_value\": " << format_double(truth) << "}\n";
  if (!truth_file) throw IoError("failed while writing " + out.truth_path);
  return out;
}

}  // namespace embope

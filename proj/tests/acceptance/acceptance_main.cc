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

// Acceptance checks. Each criterion prints detail lines followed by exactly
// one "criterion N: PASS|FAIL" line; the exit status is 0 on PASS.
//
//   embope_acceptance --criterion N [--scratch DIR]

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "embope/bench/csv_io.h"
#include "embope/bench/experiment.h"
#include "embope/bench/outputs.h"
#include "embope/bench/relative_cdf.h"
#include "embope/estimators.h"
#include "embope/kernel_view.h"
#include "embope/sampling.h"
#include "embope/synth.h"
#include "support/fixtures.h"

namespace embope {
namespace {

namespace fs = std::filesystem;

// Collects sub-check outcomes for one criterion.
class Checks {
 public:
  void Expect(bool ok, const std::string& what) {
    std::printf("  [%s] %s\n", ok ? "ok" : "FAILED", what.c_str());
    all_ &= ok;
  }
  bool all() const { return all_; }

 private:
  bool all_ = true;
};

std::string Fmt(const char* format, double a) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), format, a);
  return buf;
}

std::string Fmt(const char* format, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), format, a, b);
  return buf;
}

std::string Fmt(const char* format, double a, double b, double c) {
  char buf[200];
  std::snprintf(buf, sizeof(buf), format, a, b, c);
  return buf;
}

// mse[(cell field value, estimator)] for a grid that varies one axis.
using MseTable = std::map<std::pair<int, std::string>, AggregateRecord>;

MseTable Index(const ExperimentResult& result,
               int (*axis)(const CellCoordinates&)) {
  MseTable out;
  for (const AggregateRecord& a : result.aggregates) {
    out[{axis(a.cell), a.estimator}] = a;
  }
  return out;
}

void PrintAggregates(const ExperimentResult& result, double scale,
                     const char* unit) {
  std::printf("  %-8s %-6s %-8s %-22s %-12s %-10s %s\n", "actions", "hidden",
              "emb_size", "estimator", unit, "stderr", "runs(failed)");
  for (const AggregateRecord& a : result.aggregates) {
    std::printf("  %-8d %-6d %-8d %-22s %-12.4f %-10.4f %d(%d)\n",
                a.cell.n_actions, a.cell.hidden_dims, a.cell.embedding_size,
                a.estimator.c_str(), a.mse_mean * scale,
                a.mse_stderr * scale, a.runs, a.failed);
  }
}

// 1. Toy protocol, MSE reported in units of 1e-3.
bool Criterion1() {
  ExperimentSpec spec;
  spec.kind = ExperimentKind::kToy;
  spec.action_counts = {50, 100, 200, 500, 1000};
  spec.sample_sizes = {1000};
  spec.embedding_dims = {0};
  spec.runs = 750;
  spec.toy_datasets_per_function = 15;
  spec.estimators = {"ips", "dm", "learned_mips_onehot"};
  const ExperimentResult result = run_experiment(spec);
  PrintAggregates(result, 1e3, "mse(x1e3)");
  const MseTable t =
      Index(result, [](const CellCoordinates& c) { return c.n_actions; });
  Checks checks;
  for (int a : spec.action_counts) {
    const double ips_mse = t.at({a, "ips"}).mse_mean * 1e3;
    const double lm = t.at({a, "learned_mips_onehot"}).mse_mean * 1e3;
    checks.Expect(lm < ips_mse,
                  "(a) |A|=" + std::to_string(a) +
                      Fmt(": learned MIPS %.4f < IPS %.4f", lm, ips_mse));
  }
  const double dm100 = t.at({100, "dm"}).mse_mean * 1e3;
  const double dm500 = t.at({500, "dm"}).mse_mean * 1e3;
  checks.Expect(dm100 > 2.0, Fmt("(b) DM at |A|=100: %.4f > 2.0", dm100));
  checks.Expect(dm500 > 20.0, Fmt("(b) DM at |A|=500: %.4f > 20", dm500));
  for (int a : spec.action_counts) {
    const double ips_mse = t.at({a, "ips"}).mse_mean * 1e3;
    checks.Expect(ips_mse >= 0.4 && ips_mse <= 1.0,
                  "(c) |A|=" + std::to_string(a) +
                      Fmt(": IPS %.4f in [0.4, 1.0]", ips_mse));
  }
  for (int a : spec.action_counts) {
    const double lm = t.at({a, "learned_mips_onehot"}).mse_mean * 1e3;
    checks.Expect(lm >= 0.4 && lm <= 0.8,
                  "(d) |A|=" + std::to_string(a) +
                      Fmt(": learned MIPS %.4f in [0.4, 0.8]", lm));
  }
  return checks.all();
}

// 2. Synthetic trend at |A| = 1000.
bool Criterion2() {
  ExperimentSpec spec;
  spec.kind = ExperimentKind::kSynthGrid;
  spec.action_counts = {10, 100, 1000};
  spec.sample_sizes = {20000};
  spec.embedding_dims = {3};
  spec.runs = 30;
  spec.estimators = {"ips", "dm", "dr", "mips", "learned_mips_onehot"};
  const ExperimentResult result = run_experiment(spec);
  PrintAggregates(result, 1.0, "mse");
  const MseTable t =
      Index(result, [](const CellCoordinates& c) { return c.n_actions; });
  auto mse = [&](const char* name) { return t.at({1000, name}).mse_mean; };
  Checks checks;
  checks.Expect(mse("mips") < mse("ips"),
                Fmt("MIPS %.5g < IPS %.5g at |A|=1000", mse("mips"),
                    mse("ips")));
  for (const char* other : {"ips", "dm", "dr"}) {
    checks.Expect(mse("learned_mips_onehot") < mse(other),
                  std::string("learned MIPS OneHot ") +
                      Fmt("%.5g < ", mse("learned_mips_onehot")) + other +
                      Fmt(" %.5g at |A|=1000", mse(other)));
  }
  return checks.all();
}

// 3. Two of four embedding dimensions hidden.
bool Criterion3() {
  ExperimentSpec spec;
  spec.kind = ExperimentKind::kHiddenDims;
  spec.action_counts = {500};
  spec.sample_sizes = {20000};
  spec.embedding_dims = {4};
  spec.hidden_dims = {2};
  spec.runs = 30;
  spec.estimators = {"ips", "mips", "learned_mips_onehot"};
  const ExperimentResult result = run_experiment(spec);
  PrintAggregates(result, 1.0, "mse");
  const MseTable t =
      Index(result, [](const CellCoordinates& c) { return c.hidden_dims; });
  const double lm = t.at({2, "learned_mips_onehot"}).mse_mean;
  const double m = t.at({2, "mips"}).mse_mean;
  Checks checks;
  checks.Expect(lm < m, Fmt("learned MIPS OneHot %.5g < masked MIPS %.5g",
                            lm, m));
  return checks.all();
}

// 4. Estimator identities.
bool Criterion4() {
  Checks checks;
  double worst_dr = 0, worst_switch_inf = 0, worst_switch_zero = 0,
         worst_on_policy = 0, worst_kernel = 0;
  bool snips_in_range = true;
  for (int seed = 0; seed < 100; ++seed) {
    testing::RandomLogOptions opts;
    opts.n = 150;
    opts.n_actions = 6;
    const LoggedDataset data = testing::RandomLog(opts, seed);
    RngStream rng = SeededRng(seed).Stream("identity");
    const PolicyMatrix pi =
        testing::RandomPolicy(data.size(), data.n_actions(), rng);
    const Matrix q = SampleStandardNormal(rng, data.size(), data.n_actions());
    const Matrix zero = Matrix::Zero(data.size(), data.n_actions());
    auto rel = [](double a, double b) {
      return std::abs(a - b) / std::max(1.0, std::abs(b));
    };
    worst_dr = std::max(worst_dr, rel(dr(data, pi, zero).estimate,
                                      ips(data, pi).estimate));
    worst_switch_inf = std::max(
        worst_switch_inf,
        rel(switch_dr(data, pi, q, std::numeric_limits<double>::infinity())
                .estimate,
            dr(data, pi, q).estimate));
    worst_switch_zero = std::max(
        worst_switch_zero,
        rel(switch_dr(data, pi, q, std::numeric_limits<double>::min())
                .estimate,
            dm(data, pi, q).estimate));
    const double s = snips(data, pi).estimate;
    snips_in_range &= s >= data.rewards().minCoeff() - 1e-12 &&
                      s <= data.rewards().maxCoeff() + 1e-12;
    worst_on_policy =
        std::max(worst_on_policy, rel(ips(data, data.logging_policy()).estimate,
                                      data.rewards().mean()));

    const NonContextualLog log =
        testing::RandomNonContextualLog(60, 5, 2, 1000 + seed);
    Matrix posterior(log.size(), 5);
    for (int t = 0; t < log.size(); ++t) {
      posterior.row(t) = SampleDirichlet(rng, Vector::Ones(5)).transpose();
    }
    const Vector target = SampleDirichlet(rng, Vector::Ones(5));
    worst_kernel = std::max(
        worst_kernel,
        std::abs(dm_value(target, dm_equivalent_reward(log, posterior)) -
                 mips_weight_form(log, posterior, target)));
  }
  checks.Expect(worst_dr <= 1e-12,
                Fmt("dr(q = 0) = ips, max deviation %.3g", worst_dr));
  checks.Expect(worst_switch_inf <= 1e-12,
                Fmt("switch_dr(tau = inf) = dr, max deviation %.3g",
                    worst_switch_inf));
  checks.Expect(worst_switch_zero <= 1e-12,
                Fmt("switch_dr(tau -> 0) = dm, max deviation %.3g",
                    worst_switch_zero));
  checks.Expect(snips_in_range, "snips within [min r, max r] on 100 logs");
  checks.Expect(worst_on_policy <= 1e-12,
                Fmt("target = logging gives ips = mean reward, max "
                    "deviation %.3g",
                    worst_on_policy));
  checks.Expect(worst_kernel <= 1e-12,
                Fmt("sum_a pi(a) r~(a) = weight-form MIPS on 100 fixtures, "
                    "max deviation %.3g",
                    worst_kernel));
  return checks.all();
}

// Sum over the joint embedding space of prod_k p(e_k | a) q(x, e).
double EnumeratedMarginal(const SynthEnvironment& env, const Vector& x,
                          int action) {
  const SynthConfig& c = env.config();
  const SynthParameters& p = env.params();
  std::vector<int> codes(c.embedding_dims, 0);
  const Matrix& probs = env.embedding_probs(action);
  double total = 0.0;
  while (true) {
    double prob = 1.0, q = 0.0;
    for (int k = 0; k < c.embedding_dims; ++k) {
      prob *= probs(k, codes[k]);
      const Vector xe = p.category_vectors[k].row(codes[k]).transpose();
      q += p.eta[k] * (x.dot(p.m * xe) + p.theta_x.dot(x) + p.theta_e.dot(xe));
    }
    total += prob * q;
    int k = c.embedding_dims - 1;
    while (k >= 0 && ++codes[k] == c.cardinality) codes[k--] = 0;
    if (k < 0) break;
  }
  return total;
}

// 5. Oracles.
bool Criterion5() {
  Checks checks;

  double worst_enum = 0.0;
  int envs = 0;
  for (int seed = 0; seed < 12; ++seed) {
    RngStream rng = SeededRng(seed).Stream("shape");
    SynthConfig c;
    c.context_dim = 2 + static_cast<int>(rng.NextUniform() * 4);
    c.n_actions = 2 + static_cast<int>(rng.NextUniform() * 6);
    c.embedding_dims = 1 + static_cast<int>(rng.NextUniform() * 4);
    c.cardinality = 2 + static_cast<int>(rng.NextUniform() * 9);
    while (std::pow(c.cardinality, c.embedding_dims) > 1e4) --c.cardinality;
    c.seed = 100 + seed;
    const SynthEnvironment env = build_env(c);
    const Matrix x = sample_contexts(3, c.context_dim, rng);
    const Matrix q = marginal_expected_rewards(env, x);
    for (int i = 0; i < 3; ++i) {
      for (int a = 0; a < c.n_actions; ++a) {
        worst_enum = std::max(
            worst_enum,
            std::abs(q(i, a) - EnumeratedMarginal(env, x.row(i).transpose(), a)));
      }
    }
    ++envs;
  }
  checks.Expect(worst_enum <= 1e-10,
                Fmt("decomposed marginal = enumeration on %.0f envs, max "
                    "deviation %.3g",
                    envs, worst_enum));

  {
    SynthConfig c;
    c.context_dim = 4;
    c.n_actions = 20;
    c.embedding_dims = 3;
    c.cardinality = 5;
    c.seed = 7;
    const SynthEnvironment env = build_env(c);
    RngStream truth_rng(11);
    const Matrix xs = sample_contexts(200000, c.context_dim, truth_rng);
    const double eps = c.epsilon;
    const double truth = true_policy_value(
        env, xs, [eps](const Matrix& q) { return epsilon_greedy_policy(q, eps); });
    // 10^6 rounds: fresh context, action from the target policy, embedding
    // from p(e | a), reward with noise.
    RngStream rng(12);
    std::normal_distribution<double> normal(0.0, 1.0);
    const int rounds = 1000000, chunk = 10000;
    double sum = 0.0, sum_sq = 0.0;
    std::vector<int> codes(c.embedding_dims);
    for (int start = 0; start < rounds; start += chunk) {
      const Matrix x = sample_contexts(chunk, c.context_dim, rng);
      const PolicyMatrix pi = target_policy(env, x);
      for (int i = 0; i < chunk; ++i) {
        const int a = SampleCategoricalUnchecked(rng, &pi.probs()(i, 0),
                                                 c.n_actions, chunk);
        const Matrix& p = env.embedding_probs(a);
        for (int k = 0; k < c.embedding_dims; ++k) {
          codes[k] = SampleCategoricalUnchecked(rng, &p(k, 0), c.cardinality,
                                                p.rows());
        }
        const double r = expected_reward(env, x.row(i).transpose(), codes) +
                         c.reward_noise_sd * normal(rng.engine());
        sum += r;
        sum_sq += r * r;
      }
    }
    const double mean = sum / rounds;
    const double se = std::sqrt((sum_sq / rounds - mean * mean) / rounds);
    // The analytic value integrates over 2e5 fresh contexts; its own
    // sampling error is added in quadrature.
    RngStream se_rng(13);
    const Matrix xs2 = sample_contexts(20000, c.context_dim, se_rng);
    const PolicyMatrix pi2 = target_policy(env, xs2);
    const Matrix q2 = marginal_expected_rewards(env, xs2);
    const Vector per_ctx = (pi2.probs().array() * q2.array()).rowwise().sum();
    const double ctx_sd =
        std::sqrt((per_ctx.array() - per_ctx.mean()).square().mean());
    const double truth_se = ctx_sd / std::sqrt(200000.0);
    const double total_se = std::sqrt(se * se + truth_se * truth_se);
    checks.Expect(std::abs(mean - truth) <= 3 * total_se,
                  Fmt("true_policy_value %.5f vs 1e6-round Monte Carlo %.5f, "
                      "3 SE = %.5f",
                      truth, mean, 3 * total_se));
  }

  {
    testing::RandomLogOptions opts;
    opts.n = 80;
    const LoggedDataset data = testing::RandomLog(opts, 3);
    double worst = 0.0;
    for (InputRepr repr :
         {InputRepr::kOneHot, InputRepr::kPredefined, InputRepr::kCombined}) {
      for (int size : {0, 2}) {
        TrainConfig cfg;
        cfg.epochs = 0;
        cfg.init_sd = 0.8;
        cfg.embedding_size = size;
        cfg.use_bias = true;
        RewardModel model = train_reward_model(data, repr, cfg);
        model.bias = -0.2;
        const double l2 = 0.03, h = 1e-6;
        RewardModelGradient g;
        reward_model_objective(model, data, l2, &g);
        auto check = [&](double& param, double analytic) {
          const double saved = param;
          param = saved + h;
          const double up = reward_model_objective(model, data, l2, nullptr);
          param = saved - h;
          const double down = reward_model_objective(model, data, l2, nullptr);
          param = saved;
          const double fd = (up - down) / (2 * h);
          worst = std::max(worst, std::abs(analytic - fd) /
                                      std::max(1e-3, std::abs(fd)));
        };
        for (Eigen::Index i = 0; i < model.embedding_layer.size(); ++i) {
          check(model.embedding_layer.data()[i],
                g.embedding_layer.data()[i]);
        }
        if (model.context_projection) {
          for (Eigen::Index i = 0; i < model.context_projection->size(); ++i) {
            check(model.context_projection->data()[i],
                  g.context_projection.data()[i]);
          }
        }
        check(model.bias, g.bias);
      }
    }
    checks.Expect(worst <= 1e-4,
                  Fmt("reward-model gradient vs finite differences, max "
                      "relative error %.3g",
                      worst));
  }

  {
    RngStream rng(21);
    const int n = 500;
    const Matrix x = SampleStandardNormal(rng, n, 4);
    Vector w(4);
    w << 0.7, -1.2, 0.3, 2.0;
    const Vector r = x * w;
    const LoggedDataset data(x, std::vector<int>(n, 0), r, Vector::Ones(n), 1);
    TrainConfig cfg;
    cfg.learning_rate = 0.05;
    cfg.epochs = 300;
    cfg.batch_size = 100;
    const RewardModel model = train_reward_model(data, InputRepr::kOneHot, cfg);
    const Vector ne = (x.transpose() * x).ldlt().solve(x.transpose() * r);
    const Vector fitted = predict_reward(model, x, 0);
    const double rmse = std::sqrt((fitted - x * ne).squaredNorm() / n);
    checks.Expect(rmse <= 1e-3,
                  Fmt("single-action noiseless fit vs normal equations, "
                      "RMSE %.3g",
                      rmse));
  }
  return checks.all();
}

// 6. Learned embedding size ablation.
bool Criterion6() {
  ExperimentSpec spec;
  spec.kind = ExperimentKind::kEmbedSize;
  spec.action_counts = {100};
  spec.sample_sizes = {20000};
  spec.embedding_dims = {3};
  spec.synth.context_dim = 100;
  spec.embedding_sizes = {2, 4, 8, 16, 32, 64, 0};
  spec.runs = 50;
  spec.estimators = {"ips", "learned_mips_onehot"};
  const ExperimentResult result = run_experiment(spec);
  PrintAggregates(result, 1.0, "mse");
  const MseTable t = Index(
      result, [](const CellCoordinates& c) { return c.embedding_size; });
  auto relative = [&](int size) {
    return t.at({size, "learned_mips_onehot"}).mse_mean /
           t.at({size, "ips"}).mse_mean;
  };
  for (int s : spec.embedding_sizes) {
    std::printf("  relative MSE at size %s: %.4f\n",
                s == 0 ? "full" : std::to_string(s).c_str(), relative(s));
  }
  const double best = std::min(relative(8), relative(16));
  Checks checks;
  checks.Expect(relative(2) > best,
                Fmt("size 2 (%.4f) worse than best of {8, 16} (%.4f)",
                    relative(2), best));
  return checks.all();
}

std::string Slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

// CDF(1.0) per estimator, straight from the runs.csv text.
std::map<std::string, double> CdfAtOneFromRunsCsv(const fs::path& path) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  const std::vector<std::string> header = SplitCsv(line);
  auto col = [&](const char* name) {
    return static_cast<size_t>(
        std::find(header.begin(), header.end(), name) - header.begin());
  };
  const size_t c_run = col("run"), c_est = col("estimator"),
               c_se = col("squared_error"), c_status = col("status");
  std::map<int, double> ips_error;
  std::vector<std::tuple<int, std::string, double>> others;
  while (std::getline(in, line)) {
    const std::vector<std::string> f = SplitCsv(line);
    if (f[c_status] != "ok") continue;
    const int run = std::stoi(f[c_run]);
    const double se = std::strtod(f[c_se].c_str(), nullptr);
    if (f[c_est] == "ips") {
      ips_error[run] = se;
    } else {
      others.emplace_back(run, f[c_est], se);
    }
  }
  std::map<std::string, std::pair<int, int>> counts;
  for (const auto& [run, name, se] : others) {
    auto& [below, total] = counts[name];
    below += se / ips_error.at(run) <= 1.0;
    ++total;
  }
  std::map<std::string, double> out;
  for (const auto& [name, c] : counts) {
    out[name] = static_cast<double>(c.first) / c.second;
  }
  return out;
}

std::map<std::string, double> CdfAtOneFromSummary(const fs::path& path) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  const std::vector<std::string> header = SplitCsv(line);
  const size_t c_est =
      std::find(header.begin(), header.end(), "estimator") - header.begin();
  const size_t c_val =
      std::find(header.begin(), header.end(), "cdf_at_1") - header.begin();
  std::map<std::string, double> out;
  while (std::getline(in, line)) {
    const std::vector<std::string> f = SplitCsv(line);
    out[f[c_est]] = std::strtod(f[c_val].c_str(), nullptr);
  }
  return out;
}

// 7. Real-data protocol on a synthetic stand-in.
bool Criterion7(const fs::path& scratch) {
  Checks checks;
  const fs::path data_dir = scratch / "criterion7_standin";
  const RealProtocolOptions files =
      make_real_standin(data_dir.string(), 10000, 2024);
  auto run_once = [&](const fs::path& out, int workers) {
    ExperimentSpec spec;
    spec.kind = ExperimentKind::kRealProtocol;
    spec.real = files;
    spec.real.bootstrap_size = 10000;
    spec.runs = 150;
    spec.workers = workers;
    spec.seed = 77;
    const ExperimentResult result = run_experiment(spec);
    const std::vector<RelativeCdf> cdfs =
        relative_mse_cdf(result.runs, result.estimators);
    emit_outputs(out.string(), result, cdfs);
    return result;
  };
  const fs::path first = scratch / "criterion7_a";
  const fs::path second = scratch / "criterion7_b";
  fs::remove_all(first);
  fs::remove_all(second);
  const ExperimentResult result = run_once(first, 0);
  PrintAggregates(result, 1.0, "mse");
  int failed = 0;
  for (const RunRecord& r : result.runs) failed += !r.ok;
  checks.Expect(fs::exists(first / "cdf.csv") &&
                    fs::exists(first / "cdf_summary.csv"),
                Fmt("CDF pipeline completed on 150 bootstrap samples "
                    "(%.0f failed records)",
                    failed));

  const auto recomputed = CdfAtOneFromRunsCsv(first / "runs.csv");
  const auto emitted = CdfAtOneFromSummary(first / "cdf_summary.csv");
  double worst = 0.0;
  bool same_keys = recomputed.size() == emitted.size();
  for (const auto& [name, value] : recomputed) {
    auto it = emitted.find(name);
    if (it == emitted.end()) {
      same_keys = false;
      continue;
    }
    std::printf("  CDF(1.0) %-22s %.4f\n", name.c_str(), it->second);
    worst = std::max(worst, std::abs(value - it->second));
  }
  checks.Expect(same_keys && worst <= 1e-12,
                Fmt("CDF(1.0) recomputed from runs.csv matches "
                    "cdf_summary.csv, max deviation %.3g",
                    worst));

  run_once(second, 1);
  bool identical = true;
  for (const char* f : {"runs.csv", "aggregates.csv", "aggregates.json",
                        "plot_data.csv", "cdf.csv", "cdf_summary.csv"}) {
    const bool same = Slurp(first / f) == Slurp(second / f);
    if (!same) std::printf("  %s differs between runs\n", f);
    identical &= same;
  }
  checks.Expect(identical,
                "repeated seeded run (different worker count) gives "
                "byte-identical outputs");
  return checks.all();
}

}  // namespace
}  // namespace embope

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  int criterion = 0;
  std::string scratch = "acceptance_scratch";
  app.add_option("--criterion", criterion, "Criterion number (1-7)")
      ->required()
      ->check(CLI::Range(1, 7));
  app.add_option("--scratch", scratch, "Directory for intermediate files");
  CLI11_PARSE(app, argc, argv);

  std::filesystem::create_directories(scratch);
  bool pass = false;
  std::string error;
  try {
    switch (criterion) {
      case 1: pass = embope::Criterion1(); break;
      case 2: pass = embope::Criterion2(); break;
      case 3: pass = embope::Criterion3(); break;
      case 4: pass = embope::Criterion4(); break;
      case 5: pass = embope::Criterion5(); break;
      case 6: pass = embope::Criterion6(); break;
      case 7: pass = embope::Criterion7(scratch); break;
    }
  } catch (const std::exception& e) {
    error = e.what();
  }
  if (!error.empty()) std::printf("  error: %s\n", error.c_str());
  std::printf("criterion %d: %s\n", criterion, pass ? "PASS" : "FAIL");
  return pass ? 0 : 1;
}

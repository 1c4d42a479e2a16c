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

#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "embope/errors.h"
#include "support/fixtures.h"

namespace embope {
namespace {

ExperimentSpec SmallToy() {
  ExperimentSpec spec;
  spec.kind = ExperimentKind::kToy;
  spec.action_counts = {5, 8};
  spec.sample_sizes = {200};
  spec.embedding_dims = {0};
  spec.runs = 3;
  spec.estimators = {"ips", "dm"};
  spec.train.epochs = 3;
  spec.workers = 2;
  return spec;
}

ExperimentSpec SmallSynth() {
  ExperimentSpec spec;
  spec.kind = ExperimentKind::kSynthGrid;
  spec.action_counts = {6};
  spec.sample_sizes = {300};
  spec.embedding_dims = {2};
  spec.runs = 4;
  spec.estimators = {"ips", "dm", "mips", "mips_true", "learned_mips"};
  spec.synth.context_dim = 3;
  spec.synth.cardinality = 3;
  spec.train.epochs = 3;
  spec.truth_contexts = 2000;
  return spec;
}

TEST(ExperimentTest, TwoCellsThreeRunsGiveSixRecordsPerEstimator) {
  const ExperimentResult result = run_experiment(SmallToy());
  EXPECT_EQ(result.experiment, "toy");
  EXPECT_EQ(result.estimators, (std::vector<std::string>{"ips", "dm"}));
  ASSERT_EQ(result.runs.size(), 12u);
  for (const char* name : {"ips", "dm"}) {
    int count = 0;
    for (const RunRecord& r : result.runs) count += r.estimator == name;
    EXPECT_EQ(count, 6) << name;
  }
  std::set<std::uint64_t> seeds;
  for (const RunRecord& r : result.runs) {
    EXPECT_TRUE(r.ok) << r.error;
    EXPECT_DOUBLE_EQ(r.squared_error,
                     (r.estimate - r.true_value) * (r.estimate - r.true_value));
    seeds.insert(r.seed);
  }
  EXPECT_EQ(seeds.size(), 6u);
  // Runs 0..2 share one reward function, hence one true value per cell.
  EXPECT_EQ(result.runs[0].true_value, result.runs[4].true_value);
  ASSERT_EQ(result.aggregates.size(), 4u);
  EXPECT_EQ(result.aggregates[0].estimator, "ips");
  EXPECT_EQ(result.aggregates[0].cell.n_actions, 5);
  EXPECT_EQ(result.aggregates[0].runs, 3);
}

TEST(ExperimentTest, AggregatesByHand) {
  std::vector<RunRecord> runs;
  auto add = [&](const std::string& est, double se, bool ok) {
    RunRecord r;
    r.experiment = "synth";
    r.cell = {10, 100, 3, 0, 0};
    r.estimator = est;
    r.squared_error = se;
    r.ok = ok;
    runs.push_back(r);
  };
  add("b", 1.0, true);
  add("a", 2.0, true);
  add("b", 3.0, true);
  add("b", 8.0, true);
  add("b", NAN, false);
  add("a", NAN, false);
  const std::vector<AggregateRecord> agg = aggregate(runs, {"b", "a"});
  ASSERT_EQ(agg.size(), 2u);
  EXPECT_EQ(agg[0].estimator, "b");
  EXPECT_DOUBLE_EQ(agg[0].mse_mean, 4.0);
  // Sample sd of {1, 3, 8} is sqrt(13); stderr divides by sqrt(3).
  EXPECT_NEAR(agg[0].mse_stderr, std::sqrt(13.0 / 3.0), 1e-14);
  EXPECT_EQ(agg[0].runs, 3);
  EXPECT_EQ(agg[0].failed, 1);
  EXPECT_EQ(agg[1].estimator, "a");
  EXPECT_DOUBLE_EQ(agg[1].mse_mean, 2.0);
  EXPECT_EQ(agg[1].mse_stderr, 0.0);
}

TEST(ExperimentTest, ResultsDoNotDependOnWorkerCount) {
  ExperimentSpec one = SmallSynth();
  one.workers = 1;
  ExperimentSpec many = SmallSynth();
  many.workers = 3;
  const ExperimentResult a = run_experiment(one);
  const ExperimentResult b = run_experiment(many);
  ASSERT_EQ(a.runs.size(), b.runs.size());
  for (size_t i = 0; i < a.runs.size(); ++i) {
    EXPECT_EQ(a.runs[i].estimator, b.runs[i].estimator);
    EXPECT_EQ(a.runs[i].run, b.runs[i].run);
    EXPECT_EQ(a.runs[i].estimate, b.runs[i].estimate);
    EXPECT_EQ(a.runs[i].true_value, b.runs[i].true_value);
  }
}

TEST(ExperimentTest, HiddenDimsProduceOneCellPerValidValue) {
  ExperimentSpec spec = SmallSynth();
  spec.kind = ExperimentKind::kHiddenDims;
  spec.embedding_dims = {3};
  spec.hidden_dims = {0, 1, 2, 3};
  spec.estimators = {"ips", "mips", "mips_slope"};
  spec.runs = 2;
  const ExperimentResult result = run_experiment(spec);
  std::set<int> hidden;
  for (const RunRecord& r : result.runs) {
    hidden.insert(r.cell.hidden_dims);
    EXPECT_TRUE(r.ok) << r.error;
  }
  EXPECT_EQ(hidden, (std::set<int>{0, 1, 2}));
  EXPECT_EQ(result.runs.size(), 2u * 3u * 3u);
  // Records are ordered (cell, run, estimator); ips ignores the hidden axis.
  EXPECT_EQ(result.runs[0].estimate, result.runs[6].estimate);
}

TEST(ExperimentTest, FailuresBecomeFailedRecords) {
  ExperimentSpec spec = SmallToy();
  spec.train.learning_rate = 1e300;
  const ExperimentResult result = run_experiment(spec);
  for (const RunRecord& r : result.runs) {
    if (r.estimator == "dm") {
      EXPECT_FALSE(r.ok);
      EXPECT_TRUE(std::isnan(r.estimate));
      EXPECT_FALSE(r.error.empty());
    } else {
      EXPECT_TRUE(r.ok);
    }
  }
  for (const AggregateRecord& a : result.aggregates) {
    if (a.estimator == "dm") {
      EXPECT_EQ(a.failed, 3);
      EXPECT_TRUE(std::isnan(a.mse_mean));
    }
  }
}

TEST(ExperimentTest, EstimatorNamesExpand) {
  EXPECT_EQ(ExpandEstimatorNames({"switch_dr", "learned_mips", "ips", "ips"}),
            (std::vector<std::string>{"switch_dr_tau5", "switch_dr_tau10",
                                      "switch_dr_tau50", "switch_dr_tau100",
                                      "learned_mips_onehot", "ips"}));
  EXPECT_EQ(ExpandEstimatorNames({"switch_dr_tau2.5"}),
            std::vector<std::string>{"switch_dr_tau2.5"});
  EXPECT_THROW(ExpandEstimatorNames({"nope"}), ParameterError);
  EXPECT_THROW(ExpandEstimatorNames({"switch_dr_tau-1"}), ParameterError);
}

TEST(ExperimentTest, ValidationRejectsBadSpecs) {
  ExperimentSpec spec = SmallToy();
  spec.estimators = {"mips"};
  EXPECT_THROW(spec.Validate(), ParameterError);
  spec = SmallToy();
  spec.runs = 0;
  EXPECT_THROW(spec.Validate(), ParameterError);
  spec = SmallSynth();
  spec.hidden_dims = {2, 5};
  EXPECT_THROW(spec.Validate(), ParameterError);
  spec = SmallSynth();
  spec.kind = ExperimentKind::kRealProtocol;
  EXPECT_THROW(spec.Validate(), ParameterError);
  EXPECT_EQ(ParseExperimentKind("hidden-dims"), ExperimentKind::kHiddenDims);
  EXPECT_STREQ(ExperimentKindName(ExperimentKind::kEmbedSize), "embed-size");
  EXPECT_THROW(ParseExperimentKind("grid"), ParameterError);
}

TEST(ExperimentTest, JsonConfigOverridesFields) {
  ExperimentSpec spec;
  apply_json_config(R"({
    "actions": [10, 20], "samples": 500, "estimators": "ips, dm",
    "runs": 7, "seed": 99, "out": "here", "intercept": false,
    "synth": {"beta": 0.5, "reward": "neural", "cardinality": 4},
    "train": {"epochs": 12, "use_bias": true},
    "mips": {"l2": 0.01, "propensity_floor": 1e-6},
    "real": {"true_value": 0.25, "bootstrap_size": 300}
  })",
                    spec);
  EXPECT_EQ(spec.action_counts, (std::vector<int>{10, 20}));
  EXPECT_EQ(spec.sample_sizes, std::vector<int>{500});
  EXPECT_EQ(spec.estimators, (std::vector<std::string>{"ips", "dm"}));
  EXPECT_EQ(spec.runs, 7);
  EXPECT_EQ(spec.seed, 99u);
  EXPECT_EQ(spec.output_dir, "here");
  EXPECT_EQ(spec.intercept_context, std::optional<bool>(false));
  EXPECT_EQ(spec.synth.beta, 0.5);
  EXPECT_EQ(spec.synth.reward_kind, RewardKind::kNeural);
  EXPECT_EQ(spec.synth.cardinality, 4);
  EXPECT_EQ(spec.train.epochs, 12);
  EXPECT_TRUE(spec.train.use_bias);
  EXPECT_EQ(spec.mips.classifier.l2, 0.01);
  EXPECT_EQ(spec.mips.propensity_floor, 1e-6);
  EXPECT_EQ(spec.real.true_value, 0.25);
  EXPECT_EQ(spec.real.bootstrap_size, 300);

  EXPECT_THROW(apply_json_config(R"({"bogus": 1})", spec), ParameterError);
  EXPECT_THROW(apply_json_config(R"({"train": {"bogus": 1}})", spec),
               ParameterError);
  EXPECT_THROW(apply_json_config(R"({"runs": "many"})", spec), ParameterError);
  EXPECT_THROW(apply_json_config("{", spec), ParameterError);
}

TEST(ExperimentTest, RealProtocolOnStandIn) {
  const std::string dir = testing::TempDir("standin");
  const RealProtocolOptions files = make_real_standin(dir, 3000, 5);
  ExperimentSpec spec;
  spec.kind = ExperimentKind::kRealProtocol;
  spec.real = files;
  spec.real.bootstrap_size = 600;
  spec.runs = 3;
  spec.estimators = {"ips", "mips"};
  const ExperimentResult result = run_experiment(spec);
  ASSERT_EQ(result.runs.size(), 6u);
  for (const RunRecord& r : result.runs) {
    EXPECT_TRUE(r.ok) << r.error;
    EXPECT_EQ(r.cell.n_actions, 240);
    EXPECT_EQ(r.cell.n_samples, 600);
    EXPECT_EQ(r.cell.embedding_dims, 4);
    EXPECT_GT(r.true_value, 0.0);
    EXPECT_LT(r.true_value, 1.0);
  }
  // Re-generating with the same seed gives the same files.
  const std::string dir2 = testing::TempDir("standin2");
  make_real_standin(dir2, 3000, 5);
  spec.real.data_path = dir2 + "/logged.csv";
  spec.real.target_path = dir2 + "/target.csv";
  spec.real.truth_path = dir2 + "/truth.json";
  const ExperimentResult again = run_experiment(spec);
  for (size_t i = 0; i < result.runs.size(); ++i) {
    EXPECT_EQ(result.runs[i].estimate, again.runs[i].estimate);
  }
}

TEST(ExperimentTest, InterceptDefaultsToToyOnly) {
  ExperimentSpec spec;
  for (ExperimentKind kind :
       {ExperimentKind::kSynthGrid, ExperimentKind::kHiddenDims,
        ExperimentKind::kEmbedSize, ExperimentKind::kRealProtocol}) {
    spec.kind = kind;
    EXPECT_FALSE(spec.UsesInterceptContext());
  }
  spec.kind = ExperimentKind::kToy;
  EXPECT_TRUE(spec.UsesInterceptContext());
  spec.intercept_context = false;
  EXPECT_FALSE(spec.UsesInterceptContext());
}

}  // namespace
}  // namespace embope

// Copyright 2026 The dpfair Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dpfair/sweep.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "dpfair/report.h"

namespace dpfair {
namespace {

namespace fs = std::filesystem;
using ::testing::HasSubstr;

ExperimentConfig SmallConfig(const std::string& extra_levels = "") {
  return *ParseExperimentConfig(
      "name: small\n"
      "dataset:\n"
      "  kind: synthetic\n"
      "  train: {group_sizes: [120, 20, 30, 110], extra_noise_dims: 2, seed: 3}\n"
      "  test: {group_sizes: [50, 50, 50, 50], seed: 4}\n"
      "training: {epochs: 3, batch_size: 32, learning_rate: 0.1}\n"
      "privacy:\n"
      "  levels:\n"
      "    - label: No DP\n"
      "    - label: eps=2\n"
      "      target_epsilon: 2\n" +
          extra_levels +
          "seeds: [5, 6]\n",
      "small.yaml");
}

std::string FreshDir(const std::string& name) {
  const fs::path dir = fs::path(::testing::TempDir()) / ("dpfair_sweep_" + name);
  fs::remove_all(dir);
  return dir.string();
}

std::map<std::string, std::string> ReadTree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file() || e.path().filename() == "timings.json") continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    files[fs::relative(e.path(), root).string()] = ss.str();
  }
  return files;
}

TEST(SweepTest, GridProducesOneReportPerRun) {
  SweepOptions options;
  options.persist = false;
  const SweepResult r = *RunSweep(SmallConfig(), options);
  ASSERT_EQ(r.reports.size(), 8u);
  ASSERT_EQ(r.summary.cells.size(), 4u);
  EXPECT_TRUE(r.summary.all_ok());
  EXPECT_EQ(r.reports[0].objective, "erm");
  EXPECT_EQ(r.reports[0].privacy_label, "No DP");
  EXPECT_EQ(r.reports[1].seed, 6u);
  EXPECT_EQ(r.reports[2].privacy_label, "eps=2");
  EXPECT_EQ(r.reports[4].objective, "group_dro");
  EXPECT_EQ(r.reports[7].cell_index, 3);
  for (const RunReport& run : r.reports) {
    EXPECT_EQ(run.group_scores.size(), 4u);
    EXPECT_EQ(run.group_tokens.size(), 4u);
    EXPECT_EQ(run.train_size, 280u);
    EXPECT_EQ(run.test_size, 200u);
    if (run.target_epsilon) {
      ASSERT_TRUE(run.realized_epsilon.has_value());
      EXPECT_LE(*run.realized_epsilon, *run.target_epsilon);
      EXPECT_EQ(run.accountant_steps, run.optimizer_steps);
    } else {
      EXPECT_FALSE(run.noise_multiplier.has_value());
    }
  }
  // Seeds of a calibrated cell share sigma.
  EXPECT_EQ(r.reports[2].noise_multiplier, r.reports[3].noise_multiplier);
}

TEST(SweepTest, MeansAggregateSeedsExactly) {
  SweepOptions options;
  options.persist = false;
  const SweepResult r = *RunSweep(SmallConfig(), options);
  for (const CellSummary& cell : r.summary.cells) {
    const RunReport& a = r.reports[2 * cell.cell_index];
    const RunReport& b = r.reports[2 * cell.cell_index + 1];
    EXPECT_EQ(cell.runs, 2);
    EXPECT_EQ(cell.score_mean, (a.overall_score + b.overall_score) / 2.0);
    EXPECT_EQ(cell.disparity_mean, (a.disparity + b.disparity) / 2.0);
    EXPECT_NEAR(cell.disparity_std, std::abs(a.disparity - b.disparity) / 2.0, 1e-15);
  }
}

TEST(SweepTest, RerunsAreByteIdentical) {
  const std::string d1 = FreshDir("a"), d2 = FreshDir("b");
  SweepOptions o1;
  o1.output_dir = d1;
  SweepOptions o2;
  o2.output_dir = d2;
  o2.jobs = 3;
  ASSERT_TRUE(RunSweep(SmallConfig(), o1).ok());
  ASSERT_TRUE(RunSweep(SmallConfig(), o2).ok());
  const auto a = ReadTree(d1), b = ReadTree(d2);
  EXPECT_EQ(a.size(), 10u);
  EXPECT_EQ(a, b);
  EXPECT_TRUE(fs::exists(fs::path(d1) / "timings.json"));
}

TEST(SweepTest, PersistedRunsReaggregateToSameSummary) {
  const std::string dir = FreshDir("reload");
  SweepOptions options;
  options.output_dir = dir;
  const SweepResult r = *RunSweep(SmallConfig(), options);
  const std::vector<RunReport> loaded = *LoadRunReports(dir);
  ASSERT_EQ(loaded.size(), r.reports.size());
  EXPECT_EQ(*Aggregate(loaded), r.summary);
  std::ifstream in(fs::path(dir) / "summary.json");
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(*SummaryFromJson(ss.str()), r.summary);
}

TEST(SweepTest, StaleRunFilesAreCleared) {
  const std::string dir = FreshDir("stale");
  fs::create_directories(fs::path(dir) / "runs");
  std::ofstream(fs::path(dir) / "runs" / "old.json") << "{}";
  SweepOptions options;
  options.output_dir = dir;
  ASSERT_TRUE(RunSweep(SmallConfig(), options).ok());
  EXPECT_FALSE(fs::exists(fs::path(dir) / "runs" / "old.json"));
  EXPECT_EQ(LoadRunReports(dir)->size(), 8u);
}

TEST(SweepTest, UnreachableBudgetFailsOnlyItsCell) {
  SweepOptions options;
  options.persist = false;
  const SweepResult r = *RunSweep(
      SmallConfig("    - label: tiny\n      target_epsilon: 0.0001\n"), options);
  ASSERT_EQ(r.reports.size(), 12u);
  EXPECT_FALSE(r.summary.all_ok());
  int failed_cells = 0;
  for (const CellSummary& cell : r.summary.cells) {
    if (cell.privacy_label == "tiny") {
      EXPECT_EQ(cell.status, "failed");
      EXPECT_EQ(cell.failed_runs, 2);
      ++failed_cells;
    } else {
      EXPECT_EQ(cell.status, "ok");
    }
  }
  EXPECT_EQ(failed_cells, 2);
  for (const RunReport& run : r.reports) {
    if (run.privacy_label == "tiny") {
      EXPECT_FALSE(run.ok());
      EXPECT_FALSE(run.error.empty());
    }
  }
}

TEST(RunReportTest, JsonRoundTrip) {
  RunReport r;
  r.experiment = "e";
  r.fingerprint = "0123456789abcdef";
  r.objective = "group_dro";
  r.privacy_label = "eps=1";
  r.target_epsilon = 1.0;
  r.noise_multiplier = 2.5;
  r.realized_epsilon = 0.999;
  r.seed = 42;
  r.seed_index = 1;
  r.cell_index = 3;
  r.tau = 5;
  r.metric = "mse";
  r.overall_score = 0.1;
  r.group_scores = {0.1, 0.3};
  r.group_tokens = {"man", "woman"};
  r.disparity = 0.2;
  r.best_group = 0;
  r.worst_group = 1;
  r.epoch_losses = {1.0, 0.5};
  r.final_group_weights = {0.4, 0.6};
  r.optimizer_steps = 10;
  r.accountant_steps = 10;
  r.sampling_rate = 0.1;
  r.train_size = 100;
  r.test_size = 20;
  const std::string json = RunReportToJson(r);
  const RunReport back = *RunReportFromJson(json);
  EXPECT_EQ(RunReportToJson(back), json);
  EXPECT_EQ(RunFileName(r), "group_dro__eps_1__tau5__seed1.json");
  EXPECT_FALSE(RunReportFromJson("{\"objective\": 1}").ok());
}

TEST(AggregateTest, RejectsInconsistentReports) {
  RunReport a;
  a.fingerprint = "x";
  a.metric = "accuracy";
  RunReport b = a;
  EXPECT_FALSE(Aggregate({a, b}).ok());
  b.seed_index = 1;
  EXPECT_TRUE(Aggregate({a, b}).ok());
  b.fingerprint = "y";
  EXPECT_THAT(std::string(Aggregate({a, b}).status().message()),
              HasSubstr("different configs"));
  EXPECT_FALSE(Aggregate({}).ok());
}

}  // namespace
}  // namespace dpfair

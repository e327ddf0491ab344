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

#include "dpfair/experiment_config.h"

#include <string>

#include "gmock/gmock.h"
#include "gtest/gtest.h"

namespace dpfair {
namespace {

using ::testing::HasSubstr;
using ::testing::StartsWith;

std::string Message(const absl::StatusOr<ExperimentConfig>& c) {
  return std::string(c.status().message());
}

TEST(ExperimentConfigTest, MinimalSyntheticUsesDefaults) {
  const ExperimentConfig c = *ParseExperimentConfig(
      "name: tiny\n"
      "dataset:\n"
      "  kind: synthetic\n",
      "tiny.yaml");
  EXPECT_EQ(c.name, "tiny");
  EXPECT_EQ(c.data.kind, DataSourceKind::kSynthetic);
  EXPECT_EQ(c.model_family, ModelFamily::kLogisticClassifier);
  EXPECT_EQ(c.metric, MetricKind::kAccuracy);
  ASSERT_EQ(c.privacy_levels.size(), 4u);
  EXPECT_FALSE(c.privacy_levels[0].is_private());
  EXPECT_EQ(c.privacy_levels[3].target_epsilon, 1.0);
  EXPECT_EQ(c.seeds.size(), 3u);
  EXPECT_EQ(c.objectives.size(), 2u);
  EXPECT_DOUBLE_EQ(c.EffectiveClippingBound(), 1.2);
  EXPECT_TRUE(c.taus.empty());
  EXPECT_TRUE(c.Validate().ok());
}

TEST(ExperimentConfigTest, ShippedConfigsLoad) {
  const ExperimentConfig celeba =
      *LoadExperimentConfig(std::string(DPFAIR_CONFIG_DIR) + "/celeba_like.yaml");
  EXPECT_EQ(celeba.name, "celeba_like");
  EXPECT_EQ(celeba.training.epochs, 20);
  EXPECT_DOUBLE_EQ(celeba.training.dro_step_size, 0.001);
  EXPECT_EQ(celeba.data.synthetic_train.extra_noise_dims, 300u);
  EXPECT_EQ(celeba.data.synthetic_test.extra_noise_dims, 300u);
  EXPECT_EQ(celeba.data.synthetic_test.seed, 1u);

  const ExperimentConfig vol =
      *LoadExperimentConfig(std::string(DPFAIR_CONFIG_DIR) + "/volatility.yaml");
  EXPECT_EQ(vol.data.kind, DataSourceKind::kSyntheticPrices);
  EXPECT_EQ(vol.metric, MetricKind::kMse);
  EXPECT_EQ(vol.taus, (std::vector<int>{1, 3, 5, 10}));
  EXPECT_DOUBLE_EQ(vol.EffectiveClippingBound(), 0.8);
  EXPECT_TRUE(vol.data.is_price_task());
}

TEST(ExperimentConfigTest, UnknownKeyReportsLineAndColumn) {
  const absl::StatusOr<ExperimentConfig> c = ParseExperimentConfig(
      "name: x\n"
      "dataset:\n"
      "  kind: synthetic\n"
      "training:\n"
      "  epochs: 3\n"
      "  learning_rat: 0.1\n",
      "bad.yaml");
  ASSERT_FALSE(c.ok());
  EXPECT_THAT(Message(c), StartsWith("bad.yaml:6:3: "));
  EXPECT_THAT(Message(c), HasSubstr("learning_rat"));
}

TEST(ExperimentConfigTest, BadValuesReportLocation) {
  const absl::StatusOr<ExperimentConfig> c = ParseExperimentConfig(
      "dataset: {kind: synthetic}\n"
      "training:\n"
      "  epochs: many\n",
      "bad.yaml");
  ASSERT_FALSE(c.ok());
  EXPECT_THAT(Message(c), StartsWith("bad.yaml:3:11: "));
  EXPECT_FALSE(ParseExperimentConfig("dataset: {kind: images}\n", "k.yaml").ok());
  EXPECT_FALSE(ParseExperimentConfig("dataset: [1, 2\n", "y.yaml").ok());
  EXPECT_FALSE(ParseExperimentConfig("- just\n- a list\n", "list.yaml").ok());
}

TEST(ExperimentConfigTest, PrivacyLevelRules) {
  const std::string head = "dataset: {kind: synthetic}\nprivacy:\n  levels:\n";
  EXPECT_THAT(Message(ParseExperimentConfig(
                  head + "    - label: a\n    - label: a\n", "p.yaml")),
              HasSubstr("p.yaml:5:14: duplicate privacy label 'a'"));
  EXPECT_THAT(Message(ParseExperimentConfig(
                  head + "    - label: a b\n    - label: a_b\n", "p.yaml")),
              HasSubstr("collides"));
  EXPECT_FALSE(ParseExperimentConfig(
                   head + "    - {label: a, target_epsilon: 1, noise_multiplier: 2}\n",
                   "p.yaml")
                   .ok());
  EXPECT_FALSE(ParseExperimentConfig(head + "    - {label: a, target_epsilon: -1}\n",
                                     "p.yaml")
                   .ok());
  const ExperimentConfig c = *ParseExperimentConfig(
      head + "    - {label: fixed, noise_multiplier: 2.5}\n", "p.yaml");
  EXPECT_EQ(c.privacy_levels[0].noise_multiplier, 2.5);
  EXPECT_TRUE(c.privacy_levels[0].is_private());
}

TEST(ExperimentConfigTest, SanitizeLabel) {
  EXPECT_EQ(SanitizeLabel("No DP"), "No_DP");
  EXPECT_EQ(SanitizeLabel("eps=0.5"), "eps_0.5");
  EXPECT_EQ(SanitizeLabel("a-b.C9"), "a-b.C9");
}

TEST(ExperimentConfigTest, ModelMustMatchTask) {
  EXPECT_FALSE(ParseExperimentConfig(
                   "dataset: {kind: synthetic}\nmodel: {family: linear}\n", "m.yaml")
                   .ok());
  EXPECT_FALSE(ParseExperimentConfig("dataset: {kind: synthetic}\ntaus: [1, 2]\n",
                                     "t.yaml")
                   .ok());
}

TEST(ExperimentConfigTest, FingerprintTracksResultRelevantFields) {
  const std::string base = "dataset: {kind: synthetic}\ntraining: {epochs: 2}\n";
  const ExperimentConfig a = *ParseExperimentConfig(base, "a.yaml");
  const ExperimentConfig b = *ParseExperimentConfig(base, "b.yaml");
  EXPECT_EQ(ConfigFingerprint(a), ConfigFingerprint(b));
  EXPECT_EQ(ConfigFingerprint(a).size(), 16u);
  const ExperimentConfig c =
      *ParseExperimentConfig(base + "output_dir: elsewhere\njobs: 4\n", "c.yaml");
  EXPECT_EQ(ConfigFingerprint(a), ConfigFingerprint(c));
  EXPECT_EQ(CanonicalConfigJson(a), CanonicalConfigJson(c));
  const ExperimentConfig d = *ParseExperimentConfig(
      "dataset: {kind: synthetic}\ntraining: {epochs: 2, learning_rate: 0.2}\n", "d.yaml");
  EXPECT_NE(ConfigFingerprint(a), ConfigFingerprint(d));
}

TEST(ExperimentConfigTest, CsvPathsResolveAgainstBaseDir) {
  const std::string yaml =
      "dataset:\n"
      "  kind: csv\n"
      "  train_path: earnings_groups.csv\n"
      "  test_path: earnings_groups.csv\n"
      "  feature_columns: [pitch_mean]\n"
      "  group_column: gender\n"
      "  label_column: volatility\n"
      "  task: regression\n";
  const ExperimentConfig c = *ParseExperimentConfig(yaml, "csv.yaml", DPFAIR_FIXTURE_DIR);
  EXPECT_EQ(c.data.train_path, std::string(DPFAIR_FIXTURE_DIR) + "/earnings_groups.csv");
  EXPECT_EQ(c.model_family, ModelFamily::kLinearRegressor);
  EXPECT_EQ(c.metric, MetricKind::kMse);
  EXPECT_EQ(c.seeds.size(), 5u);
  const ExperimentData data = *LoadExperimentData(c, std::nullopt);
  EXPECT_EQ(data.train.dataset.size(), 375u);
  EXPECT_EQ(data.test.group_tokens, data.train.group_tokens);
}

TEST(ExperimentConfigTest, PriceDataNeedsTau) {
  const ExperimentConfig c = *ParseExperimentConfig(
      "dataset:\n"
      "  kind: synthetic_prices\n"
      "  simulation: {series_per_group: [4, 2], days: 120}\n"
      "model: {family: linear}\n"
      "taus: [3]\n",
      "p.yaml");
  EXPECT_FALSE(LoadExperimentData(c, std::nullopt).ok());
  const ExperimentData data = *LoadExperimentData(c, 3);
  EXPECT_GT(data.train.dataset.size(), 0u);
  EXPECT_GT(data.test.dataset.size(), 0u);
  EXPECT_EQ(data.train.group_tokens, (std::vector<std::string>{"man", "woman"}));
}

TEST(ExperimentConfigTest, SyntheticDataMaterializes) {
  const ExperimentConfig c = *ParseExperimentConfig(
      "dataset:\n"
      "  kind: synthetic\n"
      "  train: {group_sizes: [10, 5, 5, 10], extra_noise_dims: 1}\n",
      "s.yaml");
  const ExperimentData data = *LoadExperimentData(c, std::nullopt);
  EXPECT_EQ(data.train.dataset.size(), 30u);
  EXPECT_EQ(data.test.dataset.size(), 2000u);
  EXPECT_EQ(data.test.dataset.feature_dim(), 3u);
  EXPECT_EQ(data.train.group_tokens,
            (std::vector<std::string>{"y0_a0", "y1_a0", "y0_a1", "y1_a1"}));
}

}  // namespace
}  // namespace dpfair

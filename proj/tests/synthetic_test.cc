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

#include "dpfair/synthetic.h"

#include <cmath>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "dpfair/csv_dataset.h"
#include "dpfair/group_distribution.h"
#include "dpfair/metrics.h"
#include "dpfair/objectives.h"

namespace dpfair {
namespace {

TEST(SyntheticTest, CellCountsAreExact) {
  SyntheticSpec spec;
  spec.group_sizes = {500, 10, 500, 500};
  const Dataset ds = *GenerateSynthetic(spec);
  EXPECT_EQ(ds.size(), 1510u);
  EXPECT_EQ(ds.num_groups(), kSyntheticGroups);
  const GroupDistribution dist = ComputeGroupDistribution(ds);
  EXPECT_EQ(dist.counts, (std::vector<size_t>{500, 10, 500, 500}));
  EXPECT_EQ(dist.total, 1510u);
  for (const Example& ex : ds.examples()) {
    EXPECT_EQ(ex.label, ex.group % 2 == 1 ? 1.0 : 0.0);
  }
}

TEST(SyntheticTest, DeterministicInSeed) {
  SyntheticSpec spec;
  spec.extra_noise_dims = 3;
  const Dataset a = *GenerateSynthetic(spec);
  const Dataset b = *GenerateSynthetic(spec);
  ASSERT_EQ(a.size(), b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    ASSERT_EQ(a[i].features, b[i].features);
    ASSERT_EQ(a[i].group, b[i].group);
  }
  spec.seed = 9;
  EXPECT_NE(GenerateSynthetic(spec)->examples().front().features, a[0].features);
}

TEST(SyntheticTest, FeatureMomentsWithinMonteCarloBounds) {
  SyntheticSpec spec;
  spec.group_sizes = {4000, 4000, 4000, 4000};
  spec.core_mean = 0.7;
  spec.spurious_mean = 1.3;
  spec.noise_std = 0.8;
  spec.extra_noise_dims = 2;
  spec.seed = 4;
  const Dataset ds = *GenerateSynthetic(spec);
  for (int g = 0; g < 4; ++g) {
    const double y = g % 2, a = g / 2;
    const double want[4] = {y ? 0.7 : -0.7, a ? 1.3 : -1.3, 0.0, 0.0};
    double sum[4] = {0, 0, 0, 0};
    size_t n = 0;
    for (const Example& ex : ds.examples()) {
      if (ex.group != g) continue;
      ++n;
      for (int k = 0; k < 4; ++k) sum[k] += ex.features[k];
    }
    const double bound = 5.0 * spec.noise_std / std::sqrt(static_cast<double>(n));
    for (int k = 0; k < 4; ++k) {
      EXPECT_NEAR(sum[k] / n, want[k], bound) << "group " << g << " feature " << k;
    }
  }
}

TEST(SyntheticTest, HalfAgreementCancelsSpuriousSignal) {
  SyntheticSpec spec;
  spec.group_sizes = {4000, 1, 1, 1};
  spec.spurious_agreement = 0.5;
  spec.spurious_mean = 2.0;
  const Dataset ds = *GenerateSynthetic(spec);
  double mean = 0;
  for (const Example& ex : ds.examples()) {
    if (ex.group == 0) mean += ex.features[1];
  }
  EXPECT_NEAR(mean / 4000.0, 0.0, 5.0 / std::sqrt(4000.0));
}

TEST(SyntheticTest, RejectsBadSpecs) {
  SyntheticSpec spec;
  spec.noise_std = 0.0;
  EXPECT_FALSE(GenerateSynthetic(spec).ok());
  spec = SyntheticSpec();
  spec.spurious_agreement = 1.5;
  EXPECT_FALSE(GenerateSynthetic(spec).ok());
  spec = SyntheticSpec();
  spec.group_sizes = {0, 0, 0, 0};
  EXPECT_FALSE(GenerateSynthetic(spec).ok());
}

TEST(SyntheticTest, DefaultTrainSpecIsSkewed) {
  const SyntheticSpec spec = DefaultSpuriousTrainSpec();
  const size_t total =
      std::accumulate(spec.group_sizes.begin(), spec.group_sizes.end(), size_t{0});
  EXPECT_EQ(total, 4000u);
  EXPECT_NEAR(static_cast<double>(spec.group_sizes[1]) / total, 0.0085, 0.0005);
  const SyntheticSpec test = DefaultSpuriousTestSpec();
  EXPECT_EQ(test.group_sizes, (std::array<size_t, 4>{500, 500, 500, 500}));
  EXPECT_NE(test.seed, spec.seed);
}

// A strong spurious feature and a weak core feature leave the model wrong
// on the cell where label and attribute disagree.
TEST(SyntheticTest, ErmUnderperformsOnMinorityCell) {
  double minority = 0.0, majority = 0.0;
  constexpr int kSeeds = 10;
  for (int seed = 0; seed < kSeeds; ++seed) {
    SyntheticSpec train;
    train.seed = 2 * seed;
    SyntheticSpec test = train;
    test.group_sizes = {500, 500, 500, 500};
    test.seed = 2 * seed + 1;
    const Dataset tr = *GenerateSynthetic(train);
    const Dataset te = *GenerateSynthetic(test);
    const Model m = Model::LogisticClassifier(tr.feature_dim());
    TrainConfig c;
    c.seed = seed;
    const TrainResult r = *Train(m, tr, c);
    const GroupScores s = *EvaluateGroups(m, r.params, te, MetricKind::kAccuracy);
    minority += s.per_group[1] / kSeeds;
    majority += s.per_group[2] / kSeeds;
  }
  EXPECT_LE(minority, majority - 0.1);
}

CsvSchema CelebaSchema() {
  return {{"x"}, "group", "blond", TaskKind::kClassification};
}

TEST(GroupDistributionTest, CelebaShapedFixture) {
  const LoadedDataset loaded =
      *LoadCsvDataset(std::string(DPFAIR_FIXTURE_DIR) + "/celeba_groups.csv",
                      CelebaSchema());
  const GroupDistribution dist = ComputeGroupDistribution(loaded.dataset);
  EXPECT_EQ(loaded.group_tokens, (std::vector<std::string>{"NM", "BM", "NW", "BW"}));
  EXPECT_EQ(dist.counts, (std::vector<size_t>{66874, 1387, 71629, 22880}));
  EXPECT_EQ(dist.total, loaded.dataset.size());
}

TEST(GroupDistributionTest, EarningsShapedFixture) {
  const CsvSchema schema{{"pitch_mean"}, "gender", "volatility", TaskKind::kRegression};
  const LoadedDataset loaded = *LoadCsvDataset(
      std::string(DPFAIR_FIXTURE_DIR) + "/earnings_groups.csv", schema);
  const GroupDistribution dist = ComputeGroupDistribution(loaded.dataset);
  EXPECT_EQ(loaded.group_tokens, (std::vector<std::string>{"M", "F"}));
  EXPECT_EQ(dist.counts, (std::vector<size_t>{333, 42}));
}

TEST(GroupDistributionTest, CountsSumToSize) {
  const Dataset ds = *GenerateSynthetic(DefaultSpuriousTrainSpec(3));
  const GroupDistribution dist = ComputeGroupDistribution(ds);
  EXPECT_EQ(std::accumulate(dist.counts.begin(), dist.counts.end(), size_t{0}),
            ds.size());
  EXPECT_NEAR(dist.Fraction(1), 34.0 / 4000.0, 1e-15);
}

}  // namespace
}  // namespace dpfair

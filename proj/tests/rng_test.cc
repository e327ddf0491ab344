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

#include "dpfair/rng.h"

#include <cmath>
#include <vector>

#include "gtest/gtest.h"

namespace dpfair {
namespace {

TEST(RngStreamTest, SameSeedAndLabelRepeat) {
  RngStream a(42, "train"), b(42, "train");
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.NextU64(), b.NextU64());
}

TEST(RngStreamTest, LabelsAndSeedsSeparateStreams) {
  RngStream a(42, "train"), b(42, "eval"), c(43, "train");
  const uint64_t x = a.NextU64();
  EXPECT_NE(x, b.NextU64());
  EXPECT_NE(x, c.NextU64());
}

TEST(RngStreamTest, ForkExtendsLabel) {
  RngStream parent(7, "train");
  RngStream child = parent.Fork("steps");
  EXPECT_EQ(child.label(), "train/steps");
  RngStream direct(7, "train/steps");
  EXPECT_EQ(child.NextU64(), direct.NextU64());
}

TEST(RngStreamTest, UniformStaysInUnitInterval) {
  RngStream rng(1, "u");
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.Uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(RngStreamTest, NormalMoments) {
  RngStream rng(3, "n");
  const int n = 200000;
  double sum = 0, sq = 0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.Normal();
    sum += z;
    sq += z * z;
  }
  const double mean = sum / n;
  EXPECT_NEAR(mean, 0.0, 5.0 / std::sqrt(n));
  EXPECT_NEAR(sq / n - mean * mean, 1.0, 0.02);
}

TEST(RngStreamTest, BernoulliRate) {
  RngStream rng(5, "b");
  int hits = 0;
  for (int i = 0; i < 100000; ++i) hits += rng.Bernoulli(0.3);
  EXPECT_NEAR(hits / 100000.0, 0.3, 0.01);
}

TEST(HashTest, Fnv1aKnownValues) {
  EXPECT_EQ(Fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(Fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}

}  // namespace
}  // namespace dpfair

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

#include <string>

#include "benchmark/benchmark.h"
#include "dpfair/objectives.h"
#include "dpfair/synthetic.h"

namespace dpfair {
namespace {

// One epoch over the default 4000-example benchmark.
void BM_TrainEpoch(benchmark::State& state) {
  const bool dro = state.range(0) != 0;
  const bool priv = state.range(1) != 0;
  const Dataset ds = *GenerateSynthetic(DefaultSpuriousTrainSpec());
  const Model m = Model::LogisticClassifier(ds.feature_dim());
  TrainConfig c;
  c.objective = dro ? Objective::kGroupDro : Objective::kErm;
  c.epochs = 1;
  if (priv) {
    PrivacySpec p;
    p.noise_multiplier = 1.0;
    c.privacy = p;
  }
  for (auto _ : state) benchmark::DoNotOptimize(*Train(m, ds, c));
  state.SetLabel(std::string(dro ? "group_dro" : "erm") + (priv ? "/dp" : ""));
}
BENCHMARK(BM_TrainEpoch)
    ->Args({0, 0})
    ->Args({0, 1})
    ->Args({1, 0})
    ->Args({1, 1})
    ->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace dpfair

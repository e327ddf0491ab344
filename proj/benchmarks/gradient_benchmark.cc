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

#include <vector>

#include "benchmark/benchmark.h"
#include "dpfair/dp_sgd.h"
#include "dpfair/model.h"
#include "dpfair/rng.h"

namespace dpfair {
namespace {

std::vector<Example> Examples(size_t n, size_t dim) {
  RngStream rng(1, "bench/examples");
  std::vector<Example> out(n);
  for (Example& ex : out) {
    ex.features.resize(dim);
    for (double& x : ex.features) x = rng.Normal();
    ex.label = rng.Bernoulli(0.5) ? 1.0 : 0.0;
  }
  return out;
}

void BM_LogisticGradient(benchmark::State& state) {
  const size_t dim = static_cast<size_t>(state.range(0));
  const Model m = Model::LogisticClassifier(dim);
  RngStream rng(2, "bench/init");
  const ModelParams p = m.InitParams(rng);
  const std::vector<Example> ex = Examples(1, dim);
  for (auto _ : state) benchmark::DoNotOptimize(*m.Gradient(p, ex[0]));
}
BENCHMARK(BM_LogisticGradient)->Arg(2)->Arg(302);

void BM_MlpGradient(benchmark::State& state) {
  const Model m = Model::Mlp(32, static_cast<size_t>(state.range(0)),
                             TaskKind::kClassification);
  RngStream rng(3, "bench/init");
  const ModelParams p = m.InitParams(rng);
  const std::vector<Example> ex = Examples(1, 32);
  for (auto _ : state) benchmark::DoNotOptimize(*m.Gradient(p, ex[0]));
}
BENCHMARK(BM_MlpGradient)->Arg(16)->Arg(64);

void BM_PrivateBatchGradient(benchmark::State& state) {
  const size_t batch_size = static_cast<size_t>(state.range(0));
  const Model m = Model::LogisticClassifier(302);
  RngStream rng(4, "bench/noise");
  const ModelParams p = m.InitParams(rng);
  const std::vector<Example> ex = Examples(batch_size, 302);
  Batch batch;
  for (const Example& e : ex) batch.push_back(&e);
  PrivacySpec spec;
  spec.noise_multiplier = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(*PrivateBatchGradient(m, p, batch, spec, rng));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(batch_size));
}
BENCHMARK(BM_PrivateBatchGradient)->Arg(16)->Arg(64)->Arg(256);

}  // namespace
}  // namespace dpfair

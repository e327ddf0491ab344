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

#include "benchmark/benchmark.h"
#include "dpfair/dp_sgd.h"
#include "dpfair/rdp_accountant.h"

namespace dpfair {
namespace {

void BM_RdpOfStep(benchmark::State& state) {
  const int order = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(*RdpOfStep(0.016, 1.1, order));
  }
}
BENCHMARK(BM_RdpOfStep)->Arg(2)->Arg(16)->Arg(64);

void BM_RecordSteps(benchmark::State& state) {
  RdpAccountant acc;
  for (auto _ : state) {
    benchmark::DoNotOptimize(acc.RecordSteps(0.016, 1.1, 1));
  }
}
BENCHMARK(BM_RecordSteps);

void BM_CalibrateSigma(benchmark::State& state) {
  const double target = static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(*CalibrateSigma(target, kDefaultDelta, 0.016, 1260));
  }
}
BENCHMARK(BM_CalibrateSigma)->Arg(1)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace dpfair

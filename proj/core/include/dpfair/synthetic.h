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

#ifndef DPFAIR_SYNTHETIC_H_
#define DPFAIR_SYNTHETIC_H_

#include <array>
#include <cstddef>
#include <cstdint>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpfair/dataset.h"

namespace dpfair {

// Binary classification with a spurious attribute.
//
// Every example has a label y and an attribute a, both in {0, 1}, and belongs
// to group y + 2a:
//   group 0: y=0, a=0    group 1: y=1, a=0
//   group 2: y=0, a=1    group 3: y=1, a=1
// Features are [core, spurious, extra_0, ...]:
//   core     ~ N(+core_mean if y=1 else -core_mean, noise_std)
//   spurious ~ N(+spurious_mean if s=1 else -spurious_mean, noise_std)
//   extra_k  ~ N(0, noise_std)
// where s = a with probability spurious_agreement and 1 - a otherwise.
// Skewing group_sizes so that y and a mostly agree makes the spurious feature
// predictive of the label on the majority groups only.
struct SyntheticSpec {
  std::array<size_t, 4> group_sizes = {1643, 34, 1760, 562};
  double core_mean = 0.5;
  double spurious_mean = 1.5;
  double noise_std = 1.0;
  double spurious_agreement = 1.0;
  size_t extra_noise_dims = 0;
  uint64_t seed = 0;

  absl::Status Validate() const;
};

inline constexpr int kSyntheticGroups = 4;

// Training split of the default benchmark: 4000 examples with the rarest group
// (y=1, a=0) at ~0.85%, strong class and attribute signals and 300 pure-noise
// dimensions.
SyntheticSpec DefaultSpuriousTrainSpec(uint64_t seed = 0);
// Matching evaluation split with 500 examples per group.
SyntheticSpec DefaultSpuriousTestSpec(uint64_t seed = 1);

// Examples are emitted group by group, in group-id order. Deterministic in
// spec.seed.
absl::StatusOr<Dataset> GenerateSynthetic(const SyntheticSpec& spec);

}  // namespace dpfair

#endif  // DPFAIR_SYNTHETIC_H_

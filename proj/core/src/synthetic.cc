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
#include <vector>

#include "absl/strings/str_cat.h"
#include "dpfair/rng.h"

namespace dpfair {

absl::Status SyntheticSpec::Validate() const {
  for (size_t g = 0; g < group_sizes.size(); ++g) {
    if (group_sizes[g] < 1) {
      return absl::InvalidArgumentError(
          absl::StrCat("group ", g, " must have at least one example"));
    }
  }
  if (!(noise_std > 0.0) || !std::isfinite(noise_std)) {
    return absl::InvalidArgumentError("noise_std must be positive");
  }
  if (!std::isfinite(core_mean) || !std::isfinite(spurious_mean)) {
    return absl::InvalidArgumentError("feature means must be finite");
  }
  if (!(spurious_agreement >= 0.5 && spurious_agreement <= 1.0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "spurious_agreement must lie in [0.5, 1], got ", spurious_agreement));
  }
  return absl::OkStatus();
}

SyntheticSpec DefaultSpuriousTrainSpec(uint64_t seed) {
  SyntheticSpec spec;
  spec.group_sizes = {1900, 34, 400, 1666};
  spec.core_mean = 2.0;
  spec.spurious_mean = 3.0;
  spec.extra_noise_dims = 300;
  spec.seed = seed;
  return spec;
}

SyntheticSpec DefaultSpuriousTestSpec(uint64_t seed) {
  SyntheticSpec spec = DefaultSpuriousTrainSpec(seed);
  spec.group_sizes = {500, 500, 500, 500};
  spec.seed = seed;
  return spec;
}

absl::StatusOr<Dataset> GenerateSynthetic(const SyntheticSpec& spec) {
  if (absl::Status s = spec.Validate(); !s.ok()) return s;
  RngStream rng(spec.seed, "synthetic");
  std::vector<Example> examples;
  size_t total = 0;
  for (size_t n : spec.group_sizes) total += n;
  examples.reserve(total);

  for (int group = 0; group < kSyntheticGroups; ++group) {
    const int label = group % 2;
    const int attribute = group / 2;
    for (size_t i = 0; i < spec.group_sizes[group]; ++i) {
      Example ex;
      ex.group = group;
      ex.label = label;
      ex.features.reserve(2 + spec.extra_noise_dims);
      const double core_center = label == 1 ? spec.core_mean : -spec.core_mean;
      ex.features.push_back(rng.Normal(core_center, spec.noise_std));
      const int shown =
          rng.Bernoulli(spec.spurious_agreement) ? attribute : 1 - attribute;
      const double sp_center =
          shown == 1 ? spec.spurious_mean : -spec.spurious_mean;
      ex.features.push_back(rng.Normal(sp_center, spec.noise_std));
      for (size_t k = 0; k < spec.extra_noise_dims; ++k) {
        ex.features.push_back(rng.Normal(0.0, spec.noise_std));
      }
      examples.push_back(std::move(ex));
    }
  }
  return Dataset::Create(std::move(examples), kSyntheticGroups,
                         TaskKind::kClassification);
}

}  // namespace dpfair

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

#include "dpfair/dataset.h"

#include <cmath>
#include <utility>

#include "absl/strings/str_cat.h"

namespace dpfair {

std::string TaskKindName(TaskKind kind) {
  return kind == TaskKind::kClassification ? "classification" : "regression";
}

absl::StatusOr<Dataset> Dataset::Create(std::vector<Example> examples,
                                        int num_groups, TaskKind task) {
  if (examples.empty()) {
    return absl::InvalidArgumentError("dataset must contain at least one example");
  }
  if (num_groups < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("num_groups must be >= 1, got ", num_groups));
  }
  const size_t dim = examples.front().features.size();
  for (size_t i = 0; i < examples.size(); ++i) {
    const Example& ex = examples[i];
    if (ex.features.size() != dim) {
      return absl::InvalidArgumentError(
          absl::StrCat("example ", i, " has ", ex.features.size(),
                       " features, expected ", dim));
    }
    for (double v : ex.features) {
      if (!std::isfinite(v)) {
        return absl::InvalidArgumentError(
            absl::StrCat("example ", i, " has a non-finite feature"));
      }
    }
    if (ex.group < 0 || ex.group >= num_groups) {
      return absl::InvalidArgumentError(absl::StrCat(
          "example ", i, " has group ", ex.group, " outside [0, ", num_groups,
          ")"));
    }
    if (!std::isfinite(ex.label)) {
      return absl::InvalidArgumentError(
          absl::StrCat("example ", i, " has a non-finite label"));
    }
    if (task == TaskKind::kClassification && ex.label != 0.0 &&
        ex.label != 1.0) {
      return absl::InvalidArgumentError(absl::StrCat(
          "example ", i, " has classification label ", ex.label,
          "; expected 0 or 1"));
    }
  }
  return Dataset(std::move(examples), num_groups, task);
}

std::vector<std::vector<size_t>> Dataset::IndicesByGroup() const {
  std::vector<std::vector<size_t>> buckets(num_groups_);
  for (size_t i = 0; i < examples_.size(); ++i) {
    buckets[examples_[i].group].push_back(i);
  }
  return buckets;
}

}  // namespace dpfair

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

#ifndef DPFAIR_DATASET_H_
#define DPFAIR_DATASET_H_

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"

namespace dpfair {

using GroupId = int;

enum class TaskKind { kClassification, kRegression };

std::string TaskKindName(TaskKind kind);

// One (x, g, y) record. For classification tasks the label is 0.0 or 1.0.
struct Example {
  std::vector<double> features;
  GroupId group = 0;
  double label = 0.0;
};

// A non-empty, validated collection of examples sharing one feature dimension.
class Dataset {
 public:
  // Fails when `examples` is empty, feature dimensions differ, a feature is
  // non-finite, a group id falls outside [0, num_groups), or a classification
  // label is not 0/1.
  static absl::StatusOr<Dataset> Create(std::vector<Example> examples,
                                        int num_groups, TaskKind task);

  size_t size() const { return examples_.size(); }
  size_t feature_dim() const { return examples_.front().features.size(); }
  int num_groups() const { return num_groups_; }
  TaskKind task() const { return task_; }

  const std::vector<Example>& examples() const { return examples_; }
  const Example& operator[](size_t i) const { return examples_[i]; }

  // Example indices bucketed by group id; buckets may be empty.
  std::vector<std::vector<size_t>> IndicesByGroup() const;

 private:
  Dataset(std::vector<Example> examples, int num_groups, TaskKind task)
      : examples_(std::move(examples)), num_groups_(num_groups), task_(task) {}

  std::vector<Example> examples_;
  int num_groups_;
  TaskKind task_;
};

}  // namespace dpfair

#endif  // DPFAIR_DATASET_H_

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

// Task scores and per-group disparity.

#ifndef DPFAIR_METRICS_H_
#define DPFAIR_METRICS_H_

#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "dpfair/dataset.h"
#include "dpfair/model.h"

namespace dpfair {

enum class MetricKind { kAccuracy, kF1, kMse };

std::string MetricKindName(MetricKind kind);
absl::StatusOr<MetricKind> ParseMetricKind(const std::string& name);
bool HigherIsBetter(MetricKind kind);

// All three fail on empty or mismatched inputs.
absl::StatusOr<double> Accuracy(std::span<const double> predictions,
                                std::span<const double> labels);
absl::StatusOr<double> MeanSquaredError(std::span<const double> predictions,
                                        std::span<const double> targets);
// Positive-class F1, 2PR / (P + R); 0 when P + R = 0.
absl::StatusOr<double> F1Binary(std::span<const double> predictions,
                                std::span<const double> labels);

absl::StatusOr<double> Score(MetricKind kind,
                             std::span<const double> predictions,
                             std::span<const double> labels);

struct GroupScores {
  std::vector<double> per_group;
  MetricKind kind = MetricKind::kAccuracy;
  bool higher_is_better = true;
};

// The group gap: delta = max - min of the per-group scores. best/worst follow
// higher_is_better; ties resolve to the lowest group id.
struct DisparityReport {
  double delta = 0.0;
  GroupId best_group = 0;
  GroupId worst_group = 0;
};

absl::StatusOr<DisparityReport> GroupDisparity(const GroupScores& scores);

// Scores each group of `dataset` independently. Fails if any group is empty.
absl::StatusOr<GroupScores> EvaluateGroups(const Model& model,
                                           const ModelParams& params,
                                           const Dataset& dataset,
                                           MetricKind kind);

// Score pooled over every example of `dataset`.
absl::StatusOr<double> EvaluateOverall(const Model& model,
                                       const ModelParams& params,
                                       const Dataset& dataset, MetricKind kind);

}  // namespace dpfair

#endif  // DPFAIR_METRICS_H_

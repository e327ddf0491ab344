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

#include "dpfair/metrics.h"

#include <cmath>

#include "absl/strings/str_cat.h"

namespace dpfair {
namespace {

absl::Status CheckPaired(std::span<const double> a, std::span<const double> b) {
  if (a.empty()) {
    return absl::InvalidArgumentError("metric inputs must be non-empty");
  }
  if (a.size() != b.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "metric inputs differ in length: ", a.size(), " vs ", b.size()));
  }
  return absl::OkStatus();
}

absl::Status CheckBinary(std::span<const double> values) {
  for (double v : values) {
    if (v != 0.0 && v != 1.0) {
      return absl::InvalidArgumentError(
          absl::StrCat("expected binary values, got ", v));
    }
  }
  return absl::OkStatus();
}

}  // namespace

std::string MetricKindName(MetricKind kind) {
  switch (kind) {
    case MetricKind::kAccuracy:
      return "accuracy";
    case MetricKind::kF1:
      return "f1";
    case MetricKind::kMse:
      return "mse";
  }
  return "unknown";
}

absl::StatusOr<MetricKind> ParseMetricKind(const std::string& name) {
  if (name == "accuracy") return MetricKind::kAccuracy;
  if (name == "f1") return MetricKind::kF1;
  if (name == "mse") return MetricKind::kMse;
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown metric '", name, "' (expected accuracy, f1 or mse)"));
}

bool HigherIsBetter(MetricKind kind) { return kind != MetricKind::kMse; }

absl::StatusOr<double> Accuracy(std::span<const double> predictions,
                                std::span<const double> labels) {
  if (absl::Status s = CheckPaired(predictions, labels); !s.ok()) return s;
  size_t correct = 0;
  for (size_t i = 0; i < labels.size(); ++i) {
    if (predictions[i] == labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(labels.size());
}

absl::StatusOr<double> MeanSquaredError(std::span<const double> predictions,
                                        std::span<const double> targets) {
  if (absl::Status s = CheckPaired(predictions, targets); !s.ok()) return s;
  double sum = 0.0;
  for (size_t i = 0; i < targets.size(); ++i) {
    const double r = predictions[i] - targets[i];
    sum += r * r;
  }
  return sum / static_cast<double>(targets.size());
}

absl::StatusOr<double> F1Binary(std::span<const double> predictions,
                                std::span<const double> labels) {
  if (absl::Status s = CheckPaired(predictions, labels); !s.ok()) return s;
  if (absl::Status s = CheckBinary(predictions); !s.ok()) return s;
  if (absl::Status s = CheckBinary(labels); !s.ok()) return s;
  size_t tp = 0, fp = 0, fn = 0;
  for (size_t i = 0; i < labels.size(); ++i) {
    const bool pred = predictions[i] == 1.0;
    const bool truth = labels[i] == 1.0;
    if (pred && truth) ++tp;
    if (pred && !truth) ++fp;
    if (!pred && truth) ++fn;
  }
  // 2PR/(P+R) reduces to 2TP/(2TP+FP+FN); zero when there are no true
  // positives, which covers P + R = 0.
  if (tp == 0) return 0.0;
  return 2.0 * static_cast<double>(tp) /
         static_cast<double>(2 * tp + fp + fn);
}

absl::StatusOr<double> Score(MetricKind kind,
                             std::span<const double> predictions,
                             std::span<const double> labels) {
  switch (kind) {
    case MetricKind::kAccuracy:
      return Accuracy(predictions, labels);
    case MetricKind::kF1:
      return F1Binary(predictions, labels);
    case MetricKind::kMse:
      return MeanSquaredError(predictions, labels);
  }
  return absl::InvalidArgumentError("unknown metric kind");
}

absl::StatusOr<DisparityReport> GroupDisparity(const GroupScores& scores) {
  if (scores.per_group.empty()) {
    return absl::InvalidArgumentError("disparity needs at least one group");
  }
  size_t hi = 0, lo = 0;
  for (size_t g = 0; g < scores.per_group.size(); ++g) {
    const double v = scores.per_group[g];
    if (!std::isfinite(v)) {
      return absl::InvalidArgumentError(
          absl::StrCat("group ", g, " has a non-finite score"));
    }
    if (v > scores.per_group[hi]) hi = g;
    if (v < scores.per_group[lo]) lo = g;
  }
  DisparityReport report;
  report.delta = scores.per_group[hi] - scores.per_group[lo];
  report.best_group = static_cast<GroupId>(scores.higher_is_better ? hi : lo);
  report.worst_group = static_cast<GroupId>(scores.higher_is_better ? lo : hi);
  return report;
}

absl::StatusOr<GroupScores> EvaluateGroups(const Model& model,
                                           const ModelParams& params,
                                           const Dataset& dataset,
                                           MetricKind kind) {
  const int num_groups = dataset.num_groups();
  std::vector<std::vector<double>> preds(num_groups), labels(num_groups);
  for (const Example& ex : dataset.examples()) {
    absl::StatusOr<double> p = model.Predict(params, ex);
    if (!p.ok()) return p.status();
    preds[ex.group].push_back(*p);
    labels[ex.group].push_back(ex.label);
  }
  GroupScores scores;
  scores.kind = kind;
  scores.higher_is_better = HigherIsBetter(kind);
  for (int g = 0; g < num_groups; ++g) {
    if (labels[g].empty()) {
      return absl::FailedPreconditionError(
          absl::StrCat("group ", g, " has no evaluation examples"));
    }
    absl::StatusOr<double> s = Score(kind, preds[g], labels[g]);
    if (!s.ok()) return s.status();
    scores.per_group.push_back(*s);
  }
  return scores;
}

absl::StatusOr<double> EvaluateOverall(const Model& model,
                                       const ModelParams& params,
                                       const Dataset& dataset,
                                       MetricKind kind) {
  std::vector<double> preds, labels;
  preds.reserve(dataset.size());
  labels.reserve(dataset.size());
  for (const Example& ex : dataset.examples()) {
    absl::StatusOr<double> p = model.Predict(params, ex);
    if (!p.ok()) return p.status();
    preds.push_back(*p);
    labels.push_back(ex.label);
  }
  return Score(kind, preds, labels);
}

}  // namespace dpfair

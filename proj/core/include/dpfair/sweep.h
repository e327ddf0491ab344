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

#ifndef DPFAIR_SWEEP_H_
#define DPFAIR_SWEEP_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpfair/experiment_config.h"

namespace dpfair {

// One trained model, evaluated on the test split.
struct RunReport {
  std::string experiment;
  std::string fingerprint;
  std::string objective;
  std::string privacy_label;
  std::optional<double> target_epsilon;
  // Set iff the run was private.
  std::optional<double> noise_multiplier;
  std::optional<double> realized_epsilon;
  uint64_t seed = 0;
  int seed_index = 0;
  // Position of (tau, objective, privacy level) in the sweep grid.
  int cell_index = 0;
  std::optional<int> tau;
  std::string metric;
  double overall_score = 0.0;
  std::vector<double> group_scores;
  std::vector<std::string> group_tokens;
  double disparity = 0.0;
  int best_group = 0;
  int worst_group = 0;
  // Trace summary.
  std::vector<double> epoch_losses;
  std::vector<double> final_group_weights;
  int64_t optimizer_steps = 0;
  int64_t accountant_steps = 0;
  std::optional<double> sampling_rate;
  size_t train_size = 0;
  size_t test_size = 0;
  // "ok" or "failed"; a failed run carries the error and no scores.
  std::string status = "ok";
  std::string error;
  // Not persisted in the run file; see timings.json.
  double wall_clock_seconds = 0.0;

  bool ok() const { return status == "ok"; }
};

std::string RunReportToJson(const RunReport& report);
absl::StatusOr<RunReport> RunReportFromJson(const std::string& text);
// "<objective>__<label>[__tau<t>]__seed<index>.json"
std::string RunFileName(const RunReport& report);

struct CellSummary {
  int cell_index = 0;
  std::string objective;
  std::string privacy_label;
  std::optional<double> target_epsilon;
  std::optional<int> tau;
  int runs = 0;
  int failed_runs = 0;
  // Over successful runs, in seed order; std is the population standard
  // deviation (0 for a single run).
  double score_mean = 0.0;
  double score_std = 0.0;
  double disparity_mean = 0.0;
  double disparity_std = 0.0;
  std::optional<double> realized_epsilon_mean;
  std::optional<double> noise_multiplier;
  // "ok", "partial" (some seeds failed) or "failed" (all seeds failed).
  std::string status = "ok";

  bool operator==(const CellSummary&) const = default;
};

struct SweepSummary {
  std::string name;
  std::string fingerprint;
  std::string metric;
  bool higher_is_better = true;
  std::vector<CellSummary> cells;

  bool all_ok() const;
  bool operator==(const SweepSummary&) const = default;
};

// Groups reports by cell_index and aggregates seeds in seed_index order.
absl::StatusOr<SweepSummary> Aggregate(std::vector<RunReport> reports);

struct SweepOptions {
  // Overrides config.output_dir when non-empty.
  std::string output_dir;
  // Overrides config.jobs when > 0.
  int jobs = 0;
  bool persist = true;
};

struct SweepResult {
  SweepSummary summary;
  std::vector<RunReport> reports;
  std::string output_dir;
};

// Runs every (tau, objective, privacy level, seed) combination. Sigma is
// calibrated once per (level, dataset size, batch size, steps) and shared by
// the seeds of a cell. A run that fails is recorded and the sweep moves on.
// With persistence on, writes runs/*.json, summary.json, groups.json and
// timings.json under the output directory. Only I/O errors and invalid
// configs fail the whole sweep.
absl::StatusOr<SweepResult> RunSweep(const ExperimentConfig& config,
                                     const SweepOptions& options = {});

// Reads every runs/*.json under `dir`.
absl::StatusOr<std::vector<RunReport>> LoadRunReports(const std::string& dir);

}  // namespace dpfair

#endif  // DPFAIR_SWEEP_H_

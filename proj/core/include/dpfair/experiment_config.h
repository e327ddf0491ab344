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

// YAML experiment configuration for sweeps over objective x privacy level x
// seed (x tau for the volatility task).

#ifndef DPFAIR_EXPERIMENT_CONFIG_H_
#define DPFAIR_EXPERIMENT_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpfair/csv_dataset.h"
#include "dpfair/metrics.h"
#include "dpfair/model.h"
#include "dpfair/objectives.h"
#include "dpfair/synthetic.h"
#include "dpfair/volatility.h"

namespace dpfair {

enum class DataSourceKind { kSynthetic, kCsv, kPriceSeries, kSyntheticPrices };

std::string DataSourceKindName(DataSourceKind kind);

struct DataSource {
  DataSourceKind kind = DataSourceKind::kSynthetic;
  // kSynthetic
  SyntheticSpec synthetic_train = DefaultSpuriousTrainSpec();
  SyntheticSpec synthetic_test = DefaultSpuriousTestSpec();
  // kCsv. The test file uses the training file's group vocabulary.
  std::string train_path;
  std::string test_path;
  CsvSchema schema;
  // kPriceSeries
  std::string prices_path;
  // kSyntheticPrices
  PriceSimulationSpec price_simulation;
  // kPriceSeries and kSyntheticPrices; tau comes from the sweep.
  VolatilityTaskSpec volatility;

  TaskKind task() const;
  bool is_price_task() const;
};

// One column of the results table. Exactly one of target_epsilon and
// noise_multiplier may be set; neither means a non-private run.
struct PrivacyLevel {
  std::string label;
  std::optional<double> target_epsilon;
  std::optional<double> noise_multiplier;

  bool is_private() const {
    return target_epsilon.has_value() || noise_multiplier.has_value();
  }
};

// File-name-safe form of a privacy label: characters outside [A-Za-z0-9.-]
// become '_'.
std::string SanitizeLabel(const std::string& label);

struct ExperimentConfig {
  std::string name = "experiment";
  DataSource data;
  ModelFamily model_family = ModelFamily::kLogisticClassifier;
  size_t hidden_size = 16;
  // objective, privacy and seed are overwritten per run.
  TrainConfig training;
  std::vector<Objective> objectives = {Objective::kErm, Objective::kGroupDro};
  std::vector<PrivacyLevel> privacy_levels;
  double delta = kDefaultDelta;
  // Unset means the task default (1.2 classification, 0.8 regression).
  std::optional<double> clipping_bound;
  std::vector<uint64_t> seeds;
  MetricKind metric = MetricKind::kAccuracy;
  std::vector<int> taus;
  std::string output_dir = "dpfair_out";
  int jobs = 1;

  double EffectiveClippingBound() const;
  absl::Status Validate() const;
};

// Parses a YAML document. Errors carry "<source>:<line>:<column>: " prefixes.
// Relative data paths are resolved against `base_dir` when it is non-empty.
absl::StatusOr<ExperimentConfig> ParseExperimentConfig(
    const std::string& yaml_text, const std::string& source_name,
    const std::string& base_dir = "");
absl::StatusOr<ExperimentConfig> LoadExperimentConfig(const std::string& path);

// Canonical JSON of every field that influences results (output_dir and jobs
// excluded).
std::string CanonicalConfigJson(const ExperimentConfig& config);
// 16 hex digits of FNV-1a over CanonicalConfigJson.
std::string ConfigFingerprint(const ExperimentConfig& config);

struct ExperimentData {
  LoadedDataset train;
  LoadedDataset test;
};

// Materializes the train/test split. `tau` is required for price tasks and
// ignored otherwise.
absl::StatusOr<ExperimentData> LoadExperimentData(const ExperimentConfig& config,
                                                  std::optional<int> tau);

}  // namespace dpfair

#endif  // DPFAIR_EXPERIMENT_CONFIG_H_

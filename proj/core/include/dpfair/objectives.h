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

#ifndef DPFAIR_OBJECTIVES_H_
#define DPFAIR_OBJECTIVES_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "dpfair/dataset.h"
#include "dpfair/dp_sgd.h"
#include "dpfair/model.h"

namespace dpfair {

enum class Objective { kErm, kGroupDro };

std::string ObjectiveName(Objective objective);
absl::StatusOr<Objective> ParseObjective(const std::string& name);

// Mixture weights over groups; always a point on the probability simplex.
class GroupWeights {
 public:
  static GroupWeights Uniform(int num_groups);
  // Fails unless all entries are finite, >= 0 and sum to 1 within 1e-9.
  static absl::StatusOr<GroupWeights> FromValues(std::vector<double> values);

  const std::vector<double>& values() const { return values_; }
  size_t size() const { return values_.size(); }
  double operator[](size_t g) const { return values_[g]; }

 private:
  explicit GroupWeights(std::vector<double> values)
      : values_(std::move(values)) {}
  std::vector<double> values_;
};

// q'_g proportional to q_g * exp(eta * loss_g), renormalized. Computed in log
// space, so adding a constant to every loss leaves the result unchanged.
absl::StatusOr<GroupWeights> DroWeightUpdate(const GroupWeights& weights,
                                             std::span<const double> group_losses,
                                             double step_size);

// As above, but groups whose loss is absent keep their current mass before
// renormalization.
absl::StatusOr<GroupWeights> DroWeightUpdate(
    const GroupWeights& weights,
    std::span<const std::optional<double>> group_losses, double step_size);

struct WorstGroupLoss {
  double loss = 0.0;
  GroupId group = 0;
};

// Maximum over groups of the mean per-example loss; ties go to the lowest id.
absl::StatusOr<WorstGroupLoss> ComputeWorstGroupLoss(const Model& model,
                                                     const ModelParams& params,
                                                     const Dataset& dataset);

// Mean per-example loss of every group. Fails if a group is empty.
absl::StatusOr<std::vector<double>> GroupMeanLosses(const Model& model,
                                                    const ModelParams& params,
                                                    const Dataset& dataset);

struct TrainConfig {
  Objective objective = Objective::kErm;
  int epochs = 10;
  double learning_rate = 0.1;
  // Exponentiated-gradient step on the group weights (Group DRO only).
  double dro_step_size = 0.01;
  size_t batch_size = 64;
  std::optional<PrivacySpec> privacy;
  uint64_t seed = 0;
  std::string stream_label = "train";
};

struct TrainTrace {
  // Mean minibatch loss per epoch.
  std::vector<double> epoch_losses;
  // Group weights at the end of each epoch (Group DRO only).
  std::vector<std::vector<double>> epoch_group_weights;
  std::vector<double> final_group_weights;
  int64_t optimizer_steps = 0;
  int64_t accountant_steps = 0;
  // Set for private runs.
  std::optional<double> realized_epsilon;
  std::optional<double> noise_multiplier;
  std::optional<double> sampling_rate;
};

struct TrainResult {
  ModelParams params;
  TrainTrace trace;
};

// Number of optimizer steps a config runs on `dataset_size` examples:
// epochs * ceil(N / batch_size).
int64_t TotalSteps(const TrainConfig& config, size_t dataset_size);
double SamplingRate(const TrainConfig& config, size_t dataset_size);

// Group-blind minibatch SGD on the mean loss. Minibatches are Poisson samples
// at rate batch_size / N for both private and non-private runs. With privacy
// set, each step uses PrivateBatchGradient and records one accountant step.
absl::StatusOr<TrainResult> TrainErm(const Model& model, const Dataset& dataset,
                                     const TrainConfig& config);

// Online Group DRO. Each step computes per-group minibatch losses, moves the
// group weights by DroWeightUpdate, then descends on sum_g q_g * loss_g over
// the groups present in the batch. Under privacy, clipped per-example
// gradients are weighted by q_g * |B| / |B_g| and the noise is scaled by the
// largest weight.
absl::StatusOr<TrainResult> TrainDro(const Model& model, const Dataset& dataset,
                                     const TrainConfig& config);

// Dispatches on config.objective.
absl::StatusOr<TrainResult> Train(const Model& model, const Dataset& dataset,
                                  const TrainConfig& config);

}  // namespace dpfair

#endif  // DPFAIR_OBJECTIVES_H_

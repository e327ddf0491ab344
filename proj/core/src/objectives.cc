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

#include "dpfair/objectives.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "absl/strings/str_cat.h"
#include "dpfair/rdp_accountant.h"

namespace dpfair {

std::string ObjectiveName(Objective objective) {
  return objective == Objective::kErm ? "erm" : "group_dro";
}

absl::StatusOr<Objective> ParseObjective(const std::string& name) {
  if (name == "erm") return Objective::kErm;
  if (name == "group_dro" || name == "dro") return Objective::kGroupDro;
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown objective '", name, "' (expected erm or group_dro)"));
}

GroupWeights GroupWeights::Uniform(int num_groups) {
  return GroupWeights(
      std::vector<double>(num_groups, 1.0 / static_cast<double>(num_groups)));
}

absl::StatusOr<GroupWeights> GroupWeights::FromValues(
    std::vector<double> values) {
  if (values.empty()) {
    return absl::InvalidArgumentError("group weights must be non-empty");
  }
  double sum = 0.0;
  for (double v : values) {
    if (!std::isfinite(v) || v < 0.0) {
      return absl::InvalidArgumentError(
          "group weights must be finite and non-negative");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    return absl::InvalidArgumentError(
        absl::StrCat("group weights sum to ", sum, ", not 1"));
  }
  return GroupWeights(std::move(values));
}

absl::StatusOr<GroupWeights> DroWeightUpdate(
    const GroupWeights& weights,
    std::span<const std::optional<double>> group_losses, double step_size) {
  if (group_losses.size() != weights.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("got ", group_losses.size(), " group losses for ",
                     weights.size(), " groups"));
  }
  if (!(step_size >= 0.0) || !std::isfinite(step_size)) {
    return absl::InvalidArgumentError("DRO step size must be finite and >= 0");
  }
  const size_t n = weights.size();
  std::vector<double> logits(n);
  double max_logit = -std::numeric_limits<double>::infinity();
  for (size_t g = 0; g < n; ++g) {
    double boost = 0.0;
    if (group_losses[g].has_value()) {
      if (!std::isfinite(*group_losses[g])) {
        return absl::InvalidArgumentError(
            absl::StrCat("group ", g, " has a non-finite loss"));
      }
      boost = step_size * *group_losses[g];
    }
    logits[g] = weights[g] > 0.0
                    ? std::log(weights[g]) + boost
                    : -std::numeric_limits<double>::infinity();
    max_logit = std::max(max_logit, logits[g]);
  }
  std::vector<double> next(n);
  double sum = 0.0;
  for (size_t g = 0; g < n; ++g) {
    next[g] = std::exp(logits[g] - max_logit);
    sum += next[g];
  }
  for (double& v : next) v /= sum;
  return GroupWeights::FromValues(std::move(next));
}

absl::StatusOr<GroupWeights> DroWeightUpdate(const GroupWeights& weights,
                                             std::span<const double> group_losses,
                                             double step_size) {
  std::vector<std::optional<double>> present(group_losses.begin(),
                                             group_losses.end());
  return DroWeightUpdate(weights, present, step_size);
}

absl::StatusOr<std::vector<double>> GroupMeanLosses(const Model& model,
                                                    const ModelParams& params,
                                                    const Dataset& dataset) {
  const int num_groups = dataset.num_groups();
  std::vector<double> sums(num_groups, 0.0);
  std::vector<size_t> counts(num_groups, 0);
  for (const Example& ex : dataset.examples()) {
    absl::StatusOr<double> loss = model.Loss(params, ex);
    if (!loss.ok()) return loss.status();
    sums[ex.group] += *loss;
    ++counts[ex.group];
  }
  for (int g = 0; g < num_groups; ++g) {
    if (counts[g] == 0) {
      return absl::FailedPreconditionError(
          absl::StrCat("group ", g, " has no examples"));
    }
    sums[g] /= static_cast<double>(counts[g]);
  }
  return sums;
}

absl::StatusOr<WorstGroupLoss> ComputeWorstGroupLoss(const Model& model,
                                                     const ModelParams& params,
                                                     const Dataset& dataset) {
  absl::StatusOr<std::vector<double>> means =
      GroupMeanLosses(model, params, dataset);
  if (!means.ok()) return means.status();
  WorstGroupLoss worst{(*means)[0], 0};
  for (size_t g = 1; g < means->size(); ++g) {
    if ((*means)[g] > worst.loss) worst = {(*means)[g], static_cast<GroupId>(g)};
  }
  return worst;
}

int64_t TotalSteps(const TrainConfig& config, size_t dataset_size) {
  const size_t batch = std::max<size_t>(1, config.batch_size);
  const int64_t per_epoch =
      static_cast<int64_t>((dataset_size + batch - 1) / batch);
  return static_cast<int64_t>(config.epochs) * per_epoch;
}

double SamplingRate(const TrainConfig& config, size_t dataset_size) {
  return std::min(1.0, static_cast<double>(config.batch_size) /
                           static_cast<double>(dataset_size));
}

namespace {

absl::Status ValidateTrainConfig(const TrainConfig& config) {
  if (config.epochs < 1) {
    return absl::InvalidArgumentError("epochs must be >= 1");
  }
  if (config.batch_size < 1) {
    return absl::InvalidArgumentError("batch_size must be >= 1");
  }
  if (!(config.learning_rate >= 0.0) || !std::isfinite(config.learning_rate)) {
    return absl::InvalidArgumentError("learning rate must be finite and >= 0");
  }
  if (!(config.dro_step_size >= 0.0) || !std::isfinite(config.dro_step_size)) {
    return absl::InvalidArgumentError("DRO step size must be finite and >= 0");
  }
  return absl::OkStatus();
}

absl::StatusOr<TrainResult> RunTraining(const Model& model,
                                        const Dataset& dataset,
                                        const TrainConfig& config) {
  if (absl::Status s = ValidateTrainConfig(config); !s.ok()) return s;
  if (dataset.feature_dim() != model.input_dim()) {
    return absl::InvalidArgumentError(
        absl::StrCat("dataset has ", dataset.feature_dim(),
                     " features, model expects ", model.input_dim()));
  }
  if (dataset.task() != model.task()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "model head is ", TaskKindName(model.task()), " but dataset is ",
        TaskKindName(dataset.task())));
  }
  const bool dro = config.objective == Objective::kGroupDro;
  const size_t n = dataset.size();
  const int num_groups = dataset.num_groups();
  const double rate = SamplingRate(config, n);
  const int64_t total_steps = TotalSteps(config, n);
  const int64_t steps_per_epoch = total_steps / config.epochs;

  TrainResult result;
  TrainTrace& trace = result.trace;

  std::optional<PrivacySpec> privacy = config.privacy;
  RdpAccountant accountant;
  if (privacy.has_value()) {
    privacy->sampling_rate = rate;
    privacy->total_steps = total_steps;
    if (privacy->noise_multiplier == 0.0 && privacy->target_epsilon) {
      absl::StatusOr<double> sigma = CalibrateSigma(
          *privacy->target_epsilon, privacy->delta, rate, total_steps);
      if (!sigma.ok()) return sigma.status();
      privacy->noise_multiplier = *sigma;
    }
    if (absl::Status s = privacy->Validate(); !s.ok()) return s;
    if (privacy->noise_multiplier <= 0.0) {
      return absl::InvalidArgumentError(
          "private training needs a positive noise multiplier or a target "
          "epsilon");
    }
    trace.noise_multiplier = privacy->noise_multiplier;
    trace.sampling_rate = rate;
  }

  RngStream init_rng(config.seed, config.stream_label + "/init");
  RngStream rng(config.seed, config.stream_label + "/steps");
  result.params = model.InitParams(init_rng);
  GroupWeights group_weights = GroupWeights::Uniform(num_groups);

  std::vector<double> losses;
  std::vector<double> weights;
  std::vector<double> group_sum(num_groups);
  std::vector<size_t> group_count(num_groups);
  std::vector<std::optional<double>> group_loss(num_groups);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    double epoch_loss = 0.0;
    int64_t nonempty = 0;
    for (int64_t step = 0; step < steps_per_epoch; ++step) {
      const std::vector<size_t> picked = PoissonSample(n, rate, rng);
      const Batch batch = MakeBatch(dataset, picked);

      losses.resize(batch.size());
      for (size_t i = 0; i < batch.size(); ++i) {
        absl::StatusOr<double> loss = model.Loss(result.params, *batch[i]);
        if (!loss.ok()) return loss.status();
        if (!std::isfinite(*loss)) {
          return absl::InternalError(
              absl::StrCat("non-finite loss at step ", trace.optimizer_steps));
        }
        losses[i] = *loss;
      }
      if (!batch.empty()) {
        double mean = 0.0;
        for (double l : losses) mean += l;
        epoch_loss += mean / static_cast<double>(batch.size());
        ++nonempty;
      }

      weights.assign(batch.size(), 1.0);
      if (dro && !batch.empty()) {
        std::fill(group_sum.begin(), group_sum.end(), 0.0);
        std::fill(group_count.begin(), group_count.end(), 0);
        for (size_t i = 0; i < batch.size(); ++i) {
          group_sum[batch[i]->group] += losses[i];
          ++group_count[batch[i]->group];
        }
        for (int g = 0; g < num_groups; ++g) {
          group_loss[g] = group_count[g] > 0
                              ? std::optional<double>(
                                    group_sum[g] /
                                    static_cast<double>(group_count[g]))
                              : std::nullopt;
        }
        absl::StatusOr<GroupWeights> updated =
            DroWeightUpdate(group_weights, group_loss, config.dro_step_size);
        if (!updated.ok()) return updated.status();
        group_weights = *std::move(updated);

        double present_mass = 0.0;
        int present_groups = 0;
        for (int g = 0; g < num_groups; ++g) {
          if (group_count[g] > 0) {
            present_mass += group_weights[g];
            ++present_groups;
          }
        }
        const double batch_size = static_cast<double>(batch.size());
        for (size_t i = 0; i < batch.size(); ++i) {
          const GroupId g = batch[i]->group;
          // Weights can underflow to zero after long runs; fall back to a
          // balanced mixture over the present groups.
          const double share = present_mass > 0.0
                                   ? group_weights[g] / present_mass
                                   : 1.0 / present_groups;
          weights[i] =
              share * batch_size / static_cast<double>(group_count[g]);
        }
      }

      if (privacy.has_value()) {
        absl::StatusOr<NoisyGradient> grad = PrivateWeightedGradient(
            model, result.params, batch, weights, *privacy, rng);
        if (!grad.ok()) return grad.status();
        result.params =
            DpSgdStep(result.params, *grad, config.learning_rate);
        if (absl::Status s = accountant.RecordSteps(
                rate, privacy->noise_multiplier, 1);
            !s.ok()) {
          return s;
        }
      } else {
        absl::StatusOr<std::vector<double>> grad =
            WeightedBatchGradient(model, result.params, batch, weights);
        if (!grad.ok()) return grad.status();
        result.params = SgdStep(result.params, *grad, config.learning_rate);
      }
      ++trace.optimizer_steps;
    }

    if (nonempty > 0) {
      trace.epoch_losses.push_back(epoch_loss / static_cast<double>(nonempty));
    } else {
      double full = 0.0;
      for (const Example& ex : dataset.examples()) {
        full += *model.Loss(result.params, ex);
      }
      trace.epoch_losses.push_back(full / static_cast<double>(n));
    }
    if (dro) trace.epoch_group_weights.push_back(group_weights.values());
  }

  for (double v : result.params.values) {
    if (!std::isfinite(v)) {
      return absl::InternalError("training diverged to non-finite parameters");
    }
  }
  if (dro) trace.final_group_weights = group_weights.values();
  if (privacy.has_value()) {
    trace.accountant_steps = accountant.steps_recorded();
    absl::StatusOr<double> eps = accountant.Epsilon(privacy->delta);
    if (!eps.ok()) return eps.status();
    trace.realized_epsilon = *eps;
  }
  return result;
}

}  // namespace

absl::StatusOr<TrainResult> TrainErm(const Model& model, const Dataset& dataset,
                                     const TrainConfig& config) {
  if (config.objective != Objective::kErm) {
    return absl::InvalidArgumentError("TrainErm requires objective = erm");
  }
  return RunTraining(model, dataset, config);
}

absl::StatusOr<TrainResult> TrainDro(const Model& model, const Dataset& dataset,
                                     const TrainConfig& config) {
  if (config.objective != Objective::kGroupDro) {
    return absl::InvalidArgumentError(
        "TrainDro requires objective = group_dro");
  }
  const std::vector<std::vector<size_t>> by_group = dataset.IndicesByGroup();
  for (size_t g = 0; g < by_group.size(); ++g) {
    if (by_group[g].empty()) {
      return absl::FailedPreconditionError(
          absl::StrCat("group ", g, " has no training examples"));
    }
  }
  return RunTraining(model, dataset, config);
}

absl::StatusOr<TrainResult> Train(const Model& model, const Dataset& dataset,
                                  const TrainConfig& config) {
  return config.objective == Objective::kErm ? TrainErm(model, dataset, config)
                                             : TrainDro(model, dataset, config);
}

}  // namespace dpfair

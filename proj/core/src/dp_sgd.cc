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

#include "dpfair/dp_sgd.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"

namespace dpfair {

double DefaultClippingBound(TaskKind task) {
  return task == TaskKind::kClassification ? kClassificationClippingBound
                                           : kRegressionClippingBound;
}

absl::Status PrivacySpec::Validate() const {
  if (!(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must lie in (0, 1), got ", delta));
  }
  if (!(clipping_bound > 0.0) || !std::isfinite(clipping_bound)) {
    return absl::InvalidArgumentError(
        absl::StrCat("clipping bound must be positive, got ", clipping_bound));
  }
  if (!(noise_multiplier >= 0.0) || !std::isfinite(noise_multiplier)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "noise multiplier must be finite and >= 0, got ", noise_multiplier));
  }
  if (target_epsilon.has_value() && !(*target_epsilon > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("target epsilon must be positive, got ", *target_epsilon));
  }
  if (!(sampling_rate > 0.0 && sampling_rate <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("sampling rate must lie in (0, 1], got ", sampling_rate));
  }
  return absl::OkStatus();
}

absl::Status ClipInPlace(std::span<double> grad, double bound) {
  if (!(bound > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("clipping bound must be positive, got ", bound));
  }
  double sq = 0.0;
  for (double g : grad) {
    if (!std::isfinite(g)) {
      return absl::InvalidArgumentError("cannot clip a non-finite gradient");
    }
    sq += g * g;
  }
  const double norm = std::sqrt(sq);
  if (norm > bound) {
    const double scale = bound / norm;
    for (double& g : grad) g *= scale;
  }
  return absl::OkStatus();
}

absl::StatusOr<std::vector<double>> Clip(std::span<const double> grad,
                                         double bound) {
  std::vector<double> out(grad.begin(), grad.end());
  if (absl::Status s = ClipInPlace(out, bound); !s.ok()) return s;
  return out;
}

std::vector<size_t> PoissonSample(size_t n, double rate, RngStream& rng) {
  std::vector<size_t> picked;
  picked.reserve(static_cast<size_t>(rate * static_cast<double>(n) * 1.5) + 4);
  for (size_t i = 0; i < n; ++i) {
    if (rng.Bernoulli(rate)) picked.push_back(i);
  }
  return picked;
}

Batch MakeBatch(const Dataset& dataset, std::span<const size_t> indices) {
  Batch batch;
  batch.reserve(indices.size());
  for (size_t i : indices) batch.push_back(&dataset[i]);
  return batch;
}

absl::StatusOr<std::vector<double>> ClippedGradientSum(const Model& model,
                                                       const ModelParams& params,
                                                       const Batch& batch,
                                                       double bound) {
  const size_t p = model.num_params();
  std::vector<double> sum(p, 0.0);
  std::vector<double> g(p);
  for (const Example* ex : batch) {
    absl::StatusOr<double> loss = model.LossAndGradient(params, *ex, g);
    if (!loss.ok()) return loss.status();
    if (absl::Status s = ClipInPlace(g, bound); !s.ok()) return s;
    for (size_t j = 0; j < p; ++j) sum[j] += g[j];
  }
  return sum;
}

absl::StatusOr<NoisyGradient> PrivateBatchGradient(const Model& model,
                                                   const ModelParams& params,
                                                   const Batch& batch,
                                                   const PrivacySpec& spec,
                                                   RngStream& rng) {
  const std::vector<double> ones(batch.size(), 1.0);
  return PrivateWeightedGradient(model, params, batch, ones, spec, rng);
}

absl::StatusOr<NoisyGradient> PrivateWeightedGradient(
    const Model& model, const ModelParams& params, const Batch& batch,
    std::span<const double> weights, const PrivacySpec& spec, RngStream& rng) {
  if (weights.size() != batch.size()) {
    return absl::InvalidArgumentError("one weight per batch element required");
  }
  const size_t p = model.num_params();
  NoisyGradient out;
  out.value.assign(p, 0.0);
  out.batch_size_drawn = batch.size();

  std::vector<double> g(p);
  double max_weight = batch.empty() ? 1.0 : 0.0;
  for (size_t i = 0; i < batch.size(); ++i) {
    if (!(weights[i] >= 0.0) || !std::isfinite(weights[i])) {
      return absl::InvalidArgumentError("batch weights must be finite and >= 0");
    }
    absl::StatusOr<double> loss = model.LossAndGradient(params, *batch[i], g);
    if (!loss.ok()) return loss.status();
    if (absl::Status s = ClipInPlace(g, spec.clipping_bound); !s.ok()) {
      return s;
    }
    max_weight = std::max(max_weight, weights[i]);
    for (size_t j = 0; j < p; ++j) out.value[j] += weights[i] * g[j];
  }

  if (spec.noise_multiplier > 0.0) {
    const double stddev =
        spec.noise_multiplier * spec.clipping_bound * max_weight;
    for (double& v : out.value) v += stddev * rng.Normal();
  }
  const double denom = static_cast<double>(std::max<size_t>(1, batch.size()));
  for (double& v : out.value) v /= denom;
  return out;
}

absl::StatusOr<std::vector<double>> WeightedBatchGradient(
    const Model& model, const ModelParams& params, const Batch& batch,
    std::span<const double> weights) {
  if (weights.size() != batch.size()) {
    return absl::InvalidArgumentError("one weight per batch element required");
  }
  const size_t p = model.num_params();
  std::vector<double> sum(p, 0.0);
  std::vector<double> g(p);
  for (size_t i = 0; i < batch.size(); ++i) {
    absl::StatusOr<double> loss = model.LossAndGradient(params, *batch[i], g);
    if (!loss.ok()) return loss.status();
    for (size_t j = 0; j < p; ++j) sum[j] += weights[i] * g[j];
  }
  const double denom = static_cast<double>(std::max<size_t>(1, batch.size()));
  for (double& v : sum) v /= denom;
  return sum;
}

ModelParams SgdStep(const ModelParams& params, std::span<const double> grad,
                    double learning_rate) {
  ModelParams next = params;
  for (size_t j = 0; j < next.values.size(); ++j) {
    next.values[j] -= learning_rate * grad[j];
  }
  return next;
}

ModelParams DpSgdStep(const ModelParams& params, const NoisyGradient& grad,
                      double learning_rate) {
  return SgdStep(params, grad.value, learning_rate);
}

}  // namespace dpfair

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

// DP-SGD mechanics: per-example clipping, Gaussian noise on the clipped sum,
// Poisson minibatch sampling and the descent step.

#ifndef DPFAIR_DP_SGD_H_
#define DPFAIR_DP_SGD_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpfair/dataset.h"
#include "dpfair/model.h"
#include "dpfair/rng.h"

namespace dpfair {

inline constexpr double kDefaultDelta = 1e-5;
inline constexpr double kClassificationClippingBound = 1.2;
inline constexpr double kRegressionClippingBound = 0.8;

double DefaultClippingBound(TaskKind task);

struct PrivacySpec {
  // When set and noise_multiplier is 0, the trainer calibrates sigma so that
  // the full run spends at most this budget.
  std::optional<double> target_epsilon;
  double delta = kDefaultDelta;
  // Sigma; the injected noise has standard deviation sigma * C.
  double noise_multiplier = 0.0;
  double clipping_bound = kClassificationClippingBound;
  // Filled in by the trainer from batch_size / N and the step budget.
  double sampling_rate = 1.0;
  int64_t total_steps = 0;

  absl::Status Validate() const;
};

struct NoisyGradient {
  std::vector<double> value;
  size_t batch_size_drawn = 0;
};

using Batch = std::vector<const Example*>;

// grad * min(1, bound / ||grad||_2). Fails on non-finite input or bound <= 0.
absl::StatusOr<std::vector<double>> Clip(std::span<const double> grad,
                                         double bound);
absl::Status ClipInPlace(std::span<double> grad, double bound);

// Each of n indices is kept independently with probability `rate`.
std::vector<size_t> PoissonSample(size_t n, double rate, RngStream& rng);

Batch MakeBatch(const Dataset& dataset, std::span<const size_t> indices);

// sum_i clip(g_i, C) over the batch, before noise and averaging. Adding or
// removing one example moves it by at most C in L2 norm.
absl::StatusOr<std::vector<double>> ClippedGradientSum(const Model& model,
                                                       const ModelParams& params,
                                                       const Batch& batch,
                                                       double bound);

// (1 / max(1, |batch|)) * (sum_i clip(g_i, C) + xi),
// xi ~ N(0, sigma^2 C^2 I).
absl::StatusOr<NoisyGradient> PrivateBatchGradient(const Model& model,
                                                   const ModelParams& params,
                                                   const Batch& batch,
                                                   const PrivacySpec& spec,
                                                   RngStream& rng);

// Weighted variant: (1 / max(1, |batch|)) * (sum_i w_i clip(g_i, C) + xi) with
// xi ~ N(0, (sigma C max_i w_i)^2 I). One weight per batch element, all >= 0.
// With unit weights this is exactly PrivateBatchGradient.
absl::StatusOr<NoisyGradient> PrivateWeightedGradient(
    const Model& model, const ModelParams& params, const Batch& batch,
    std::span<const double> weights, const PrivacySpec& spec, RngStream& rng);

// Non-private counterpart: (1 / max(1, |batch|)) * sum_i w_i g_i, unclipped.
absl::StatusOr<std::vector<double>> WeightedBatchGradient(
    const Model& model, const ModelParams& params, const Batch& batch,
    std::span<const double> weights);

ModelParams DpSgdStep(const ModelParams& params, const NoisyGradient& grad,
                      double learning_rate);
ModelParams SgdStep(const ModelParams& params, std::span<const double> grad,
                    double learning_rate);

}  // namespace dpfair

#endif  // DPFAIR_DP_SGD_H_

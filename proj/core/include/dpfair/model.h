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

#ifndef DPFAIR_MODEL_H_
#define DPFAIR_MODEL_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpfair/dataset.h"
#include "dpfair/rng.h"

namespace dpfair {

enum class ModelFamily { kLinearRegressor, kLogisticClassifier, kMlp };

std::string ModelFamilyName(ModelFamily family);
absl::StatusOr<ModelFamily> ParseModelFamily(const std::string& name);

// Flat trainable parameter vector. Layout by family:
//   linear / logistic: [w_0 .. w_{d-1}, b]
//   mlp:               [W1 (hidden x d, row-major), b1 (hidden), w2 (hidden), b2]
// Biases are ordinary coordinates and are clipped and noised with the rest.
struct ModelParams {
  std::vector<double> values;
};

// A small differentiable model with exact per-example gradients.
//
// Classification heads produce a logit z and use binary cross-entropy
// softplus(z) - y*z; regression heads use the squared error (f(x) - y)^2.
// The hidden layer of the MLP uses tanh.
class Model {
 public:
  static absl::StatusOr<Model> Create(ModelFamily family, size_t input_dim,
                                      size_t hidden_size = 0,
                                      TaskKind mlp_head = TaskKind::kClassification);

  static Model LinearRegressor(size_t input_dim);
  static Model LogisticClassifier(size_t input_dim);
  static Model Mlp(size_t input_dim, size_t hidden_size, TaskKind head);

  ModelFamily family() const { return family_; }
  size_t input_dim() const { return input_dim_; }
  size_t hidden_size() const { return hidden_size_; }
  TaskKind task() const { return task_; }
  size_t num_params() const;

  // Linear and logistic models start at zero; the MLP draws each layer
  // uniformly from [-1/sqrt(fan_in), 1/sqrt(fan_in)].
  ModelParams InitParams(RngStream& rng) const;

  absl::StatusOr<double> Loss(const ModelParams& params, const Example& ex) const;
  absl::StatusOr<std::vector<double>> Gradient(const ModelParams& params,
                                               const Example& ex) const;

  // Writes the gradient into `grad` (length num_params()) and returns the loss.
  absl::StatusOr<double> LossAndGradient(const ModelParams& params,
                                         const Example& ex,
                                         std::span<double> grad) const;

  // Class 1 when p >= 0.5 (logit >= 0), otherwise class 0; the raw output for
  // regression heads.
  absl::StatusOr<double> Predict(const ModelParams& params,
                                 const Example& ex) const;

  absl::Status CheckCompatible(const ModelParams& params,
                               const Example& ex) const;

 private:
  Model(ModelFamily family, size_t input_dim, size_t hidden_size, TaskKind task)
      : family_(family),
        input_dim_(input_dim),
        hidden_size_(hidden_size),
        task_(task) {}

  // Model output (logit or regression value); fills `hidden` for the MLP.
  double Forward(std::span<const double> theta, std::span<const double> x,
                 std::vector<double>* hidden) const;
  double LossFromOutput(double output, double label) const;
  double OutputGradient(double output, double label) const;

  ModelFamily family_;
  size_t input_dim_;
  size_t hidden_size_;
  TaskKind task_;
};

}  // namespace dpfair

#endif  // DPFAIR_MODEL_H_

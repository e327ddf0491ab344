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

#include "dpfair/model.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"

namespace dpfair {
namespace {

double Sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
double Softplus(double z) {
  return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

}  // namespace

std::string ModelFamilyName(ModelFamily family) {
  switch (family) {
    case ModelFamily::kLinearRegressor:
      return "linear";
    case ModelFamily::kLogisticClassifier:
      return "logistic";
    case ModelFamily::kMlp:
      return "mlp";
  }
  return "unknown";
}

absl::StatusOr<ModelFamily> ParseModelFamily(const std::string& name) {
  if (name == "linear") return ModelFamily::kLinearRegressor;
  if (name == "logistic") return ModelFamily::kLogisticClassifier;
  if (name == "mlp") return ModelFamily::kMlp;
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown model family '", name, "' (expected linear, logistic or mlp)"));
}

absl::StatusOr<Model> Model::Create(ModelFamily family, size_t input_dim,
                                    size_t hidden_size, TaskKind mlp_head) {
  if (input_dim == 0) {
    return absl::InvalidArgumentError("input_dim must be positive");
  }
  switch (family) {
    case ModelFamily::kLinearRegressor:
      return LinearRegressor(input_dim);
    case ModelFamily::kLogisticClassifier:
      return LogisticClassifier(input_dim);
    case ModelFamily::kMlp:
      if (hidden_size == 0) {
        return absl::InvalidArgumentError("mlp hidden_size must be positive");
      }
      return Mlp(input_dim, hidden_size, mlp_head);
  }
  return absl::InvalidArgumentError("unknown model family");
}

Model Model::LinearRegressor(size_t input_dim) {
  return Model(ModelFamily::kLinearRegressor, input_dim, 0,
               TaskKind::kRegression);
}

Model Model::LogisticClassifier(size_t input_dim) {
  return Model(ModelFamily::kLogisticClassifier, input_dim, 0,
               TaskKind::kClassification);
}

Model Model::Mlp(size_t input_dim, size_t hidden_size, TaskKind head) {
  return Model(ModelFamily::kMlp, input_dim, hidden_size, head);
}

size_t Model::num_params() const {
  if (family_ == ModelFamily::kMlp) {
    return hidden_size_ * input_dim_ + 2 * hidden_size_ + 1;
  }
  return input_dim_ + 1;
}

ModelParams Model::InitParams(RngStream& rng) const {
  ModelParams params;
  params.values.assign(num_params(), 0.0);
  if (family_ != ModelFamily::kMlp) return params;

  const double bound1 = 1.0 / std::sqrt(static_cast<double>(input_dim_));
  const double bound2 = 1.0 / std::sqrt(static_cast<double>(hidden_size_));
  const size_t layer1 = hidden_size_ * input_dim_ + hidden_size_;
  for (size_t i = 0; i < params.values.size(); ++i) {
    const double bound = i < layer1 ? bound1 : bound2;
    params.values[i] = rng.Uniform(-bound, bound);
  }
  return params;
}

absl::Status Model::CheckCompatible(const ModelParams& params,
                                    const Example& ex) const {
  if (params.values.size() != num_params()) {
    return absl::InvalidArgumentError(
        absl::StrCat("parameter vector has length ", params.values.size(),
                     ", model expects ", num_params()));
  }
  if (ex.features.size() != input_dim_) {
    return absl::InvalidArgumentError(
        absl::StrCat("example has ", ex.features.size(),
                     " features, model expects ", input_dim_));
  }
  return absl::OkStatus();
}

double Model::Forward(std::span<const double> theta, std::span<const double> x,
                      std::vector<double>* hidden) const {
  const size_t d = input_dim_;
  if (family_ != ModelFamily::kMlp) {
    double z = theta[d];
    for (size_t j = 0; j < d; ++j) z += theta[j] * x[j];
    return z;
  }
  const size_t h = hidden_size_;
  const double* w1 = theta.data();
  const double* b1 = w1 + h * d;
  const double* w2 = b1 + h;
  const double b2 = w2[h];
  hidden->assign(h, 0.0);
  double out = b2;
  for (size_t k = 0; k < h; ++k) {
    double pre = b1[k];
    const double* row = w1 + k * d;
    for (size_t j = 0; j < d; ++j) pre += row[j] * x[j];
    (*hidden)[k] = std::tanh(pre);
    out += w2[k] * (*hidden)[k];
  }
  return out;
}

double Model::LossFromOutput(double output, double label) const {
  if (task_ == TaskKind::kClassification) {
    return Softplus(output) - label * output;
  }
  const double r = output - label;
  return r * r;
}

double Model::OutputGradient(double output, double label) const {
  if (task_ == TaskKind::kClassification) return Sigmoid(output) - label;
  return 2.0 * (output - label);
}

absl::StatusOr<double> Model::Loss(const ModelParams& params,
                                   const Example& ex) const {
  if (absl::Status s = CheckCompatible(params, ex); !s.ok()) return s;
  std::vector<double> hidden;
  return LossFromOutput(Forward(params.values, ex.features, &hidden), ex.label);
}

absl::StatusOr<std::vector<double>> Model::Gradient(const ModelParams& params,
                                                    const Example& ex) const {
  std::vector<double> grad(num_params());
  absl::StatusOr<double> loss = LossAndGradient(params, ex, grad);
  if (!loss.ok()) return loss.status();
  return grad;
}

absl::StatusOr<double> Model::LossAndGradient(const ModelParams& params,
                                              const Example& ex,
                                              std::span<double> grad) const {
  if (absl::Status s = CheckCompatible(params, ex); !s.ok()) return s;
  if (grad.size() != num_params()) {
    return absl::InvalidArgumentError("gradient buffer has the wrong length");
  }
  const std::span<const double> theta = params.values;
  const std::span<const double> x = ex.features;
  const size_t d = input_dim_;

  std::vector<double> hidden;
  const double out = Forward(theta, x, &hidden);
  const double dout = OutputGradient(out, ex.label);

  if (family_ != ModelFamily::kMlp) {
    for (size_t j = 0; j < d; ++j) grad[j] = dout * x[j];
    grad[d] = dout;
    return LossFromOutput(out, ex.label);
  }

  const size_t h = hidden_size_;
  const double* w2 = theta.data() + h * d + h;
  double* g_w1 = grad.data();
  double* g_b1 = g_w1 + h * d;
  double* g_w2 = g_b1 + h;
  for (size_t k = 0; k < h; ++k) {
    const double dpre = dout * w2[k] * (1.0 - hidden[k] * hidden[k]);
    double* row = g_w1 + k * d;
    for (size_t j = 0; j < d; ++j) row[j] = dpre * x[j];
    g_b1[k] = dpre;
    g_w2[k] = dout * hidden[k];
  }
  g_w2[h] = dout;
  return LossFromOutput(out, ex.label);
}

absl::StatusOr<double> Model::Predict(const ModelParams& params,
                                      const Example& ex) const {
  if (absl::Status s = CheckCompatible(params, ex); !s.ok()) return s;
  std::vector<double> hidden;
  const double out = Forward(params.values, ex.features, &hidden);
  if (task_ == TaskKind::kClassification) return out >= 0.0 ? 1.0 : 0.0;
  return out;
}

}  // namespace dpfair

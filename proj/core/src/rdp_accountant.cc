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

#include "dpfair/rdp_accountant.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "absl/strings/str_cat.h"

namespace dpfair {
namespace {

constexpr int kNumOrders = kMaxRdpOrder - kMinRdpOrder + 1;

// log C(n, k) for 0 <= k <= n <= kMaxRdpOrder, from Pascal's triangle.
class LogBinomialTable {
 public:
  LogBinomialTable() {
    std::array<std::array<double, kMaxRdpOrder + 1>, kMaxRdpOrder + 1> c{};
    for (int n = 0; n <= kMaxRdpOrder; ++n) {
      c[n][0] = c[n][n] = 1.0;
      for (int k = 1; k < n; ++k) c[n][k] = c[n - 1][k - 1] + c[n - 1][k];
      for (int k = 0; k <= n; ++k) log_[n][k] = std::log(c[n][k]);
    }
  }
  double operator()(int n, int k) const { return log_[n][k]; }

 private:
  std::array<std::array<double, kMaxRdpOrder + 1>, kMaxRdpOrder + 1> log_{};
};

const LogBinomialTable& LogBinomial() {
  static const LogBinomialTable* table = new LogBinomialTable();
  return *table;
}

double LogSumExp(const std::vector<double>& terms) {
  const double m = *std::max_element(terms.begin(), terms.end());
  if (std::isinf(m)) return m;
  double s = 0.0;
  for (double t : terms) s += std::exp(t - m);
  return m + std::log(s);
}

absl::Status ValidateDelta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must lie in (0, 1), got ", delta));
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<double> RdpOfStep(double sampling_rate, double noise_multiplier,
                                 int order) {
  if (order < kMinRdpOrder || order > kMaxRdpOrder) {
    return absl::InvalidArgumentError(absl::StrCat(
        "RDP order must lie in [", kMinRdpOrder, ", ", kMaxRdpOrder, "], got ",
        order));
  }
  if (!(sampling_rate >= 0.0 && sampling_rate <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("sampling rate must lie in [0, 1], got ", sampling_rate));
  }
  if (sampling_rate == 0.0) return 0.0;
  if (noise_multiplier == 0.0) {
    return absl::InvalidArgumentError(
        "noise multiplier 0 gives unbounded privacy loss");
  }
  if (!(noise_multiplier > 0.0) || !std::isfinite(noise_multiplier)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "noise multiplier must be positive and finite, got ", noise_multiplier));
  }

  const double alpha = order;
  const double inv_two_var = 1.0 / (2.0 * noise_multiplier * noise_multiplier);
  if (sampling_rate == 1.0) return alpha * inv_two_var;

  const double log_q = std::log(sampling_rate);
  const double log_1mq = std::log1p(-sampling_rate);
  std::vector<double> terms(order + 1);
  for (int k = 0; k <= order; ++k) {
    const double kd = k;
    terms[k] = LogBinomial()(order, k) + (alpha - kd) * log_1mq + kd * log_q +
               kd * (kd - 1.0) * inv_two_var;
  }
  return LogSumExp(terms) / (alpha - 1.0);
}

absl::StatusOr<double> ComposeAndConvert(const AccountantState& state,
                                         double delta) {
  if (absl::Status s = ValidateDelta(delta); !s.ok()) return s;
  if (state.steps_recorded < 1 || state.rdp_at_order.empty()) {
    return absl::FailedPreconditionError(
        "accountant has no recorded steps to convert");
  }
  const double log_inv_delta = -std::log(delta);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [order, rdp] : state.rdp_at_order) {
    if (order < kMinRdpOrder) continue;
    best = std::min(best, rdp + log_inv_delta / (order - 1.0));
  }
  if (!std::isfinite(best)) {
    return absl::InternalError("no finite epsilon over the recorded orders");
  }
  return best;
}

RdpAccountant::RdpAccountant() { Reset(); }

void RdpAccountant::Reset() {
  state_ = AccountantState{};
  for (int order = kMinRdpOrder; order <= kMaxRdpOrder; ++order) {
    state_.rdp_at_order[order] = 0.0;
  }
}

absl::Status RdpAccountant::RecordSteps(double sampling_rate,
                                        double noise_multiplier, int64_t steps) {
  if (steps < 0) {
    return absl::InvalidArgumentError("step count must be non-negative");
  }
  if (sampling_rate != cached_rate_ || noise_multiplier != cached_sigma_) {
    std::vector<double> rdp(kNumOrders);
    for (int order = kMinRdpOrder; order <= kMaxRdpOrder; ++order) {
      absl::StatusOr<double> r =
          RdpOfStep(sampling_rate, noise_multiplier, order);
      if (!r.ok()) return r.status();
      rdp[order - kMinRdpOrder] = *r;
    }
    cached_rdp_ = std::move(rdp);
    cached_rate_ = sampling_rate;
    cached_sigma_ = noise_multiplier;
  }
  const double n = static_cast<double>(steps);
  for (int order = kMinRdpOrder; order <= kMaxRdpOrder; ++order) {
    state_.rdp_at_order[order] += n * cached_rdp_[order - kMinRdpOrder];
  }
  state_.steps_recorded += steps;
  return absl::OkStatus();
}

absl::StatusOr<double> RdpAccountant::Epsilon(double delta) const {
  return ComposeAndConvert(state_, delta);
}

absl::StatusOr<double> EpsilonForSteps(double sampling_rate,
                                       double noise_multiplier, int64_t steps,
                                       double delta) {
  RdpAccountant accountant;
  if (absl::Status s =
          accountant.RecordSteps(sampling_rate, noise_multiplier, steps);
      !s.ok()) {
    return s;
  }
  return accountant.Epsilon(delta);
}

absl::StatusOr<double> CalibrateSigma(double target_epsilon, double delta,
                                      double sampling_rate,
                                      int64_t total_steps) {
  if (!(target_epsilon > 0.0) || !std::isfinite(target_epsilon)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "target epsilon must be positive and finite, got ", target_epsilon));
  }
  if (absl::Status s = ValidateDelta(delta); !s.ok()) return s;
  if (!(sampling_rate > 0.0 && sampling_rate <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("sampling rate must lie in (0, 1], got ", sampling_rate));
  }
  if (total_steps < 1) {
    return absl::InvalidArgumentError("total_steps must be >= 1");
  }

  auto eps_at = [&](double log_sigma) {
    return EpsilonForSteps(sampling_rate, std::exp(log_sigma), total_steps,
                           delta);
  };

  double lo = std::log(kMinNoiseMultiplier);
  double hi = std::log(kMaxNoiseMultiplier);
  absl::StatusOr<double> eps_hi = eps_at(hi);
  if (!eps_hi.ok()) return eps_hi.status();
  if (*eps_hi > target_epsilon) {
    return absl::OutOfRangeError(absl::StrCat(
        "target epsilon ", target_epsilon, " is unreachable: sigma = ",
        kMaxNoiseMultiplier, " still spends ", *eps_hi));
  }
  absl::StatusOr<double> eps_lo = eps_at(lo);
  if (!eps_lo.ok()) return eps_lo.status();
  if (*eps_lo <= target_epsilon) return kMinNoiseMultiplier;

  // Invariant: eps(lo) > target >= eps(hi).
  for (int iter = 0; iter < 100 && hi - lo > 1e-13; ++iter) {
    const double mid = 0.5 * (lo + hi);
    absl::StatusOr<double> eps_mid = eps_at(mid);
    if (!eps_mid.ok()) return eps_mid.status();
    if (*eps_mid <= target_epsilon) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return std::exp(hi);
}

}  // namespace dpfair

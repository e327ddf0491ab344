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

// Renyi-DP accounting for the Poisson-subsampled Gaussian mechanism over the
// integer orders 2..64, and noise-multiplier calibration against an (eps,
// delta) target.

#ifndef DPFAIR_RDP_ACCOUNTANT_H_
#define DPFAIR_RDP_ACCOUNTANT_H_

#include <cstdint>
#include <map>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace dpfair {

inline constexpr int kMinRdpOrder = 2;
inline constexpr int kMaxRdpOrder = 64;

inline constexpr double kMinNoiseMultiplier = 0.1;
inline constexpr double kMaxNoiseMultiplier = 1000.0;

// RDP of one step of the subsampled Gaussian mechanism at integer order
// `order`:
//   q = 1:  order / (2 sigma^2)
//   q < 1:  1/(order-1) * log sum_{k=0}^{order} C(order,k) (1-q)^(order-k)
//           q^k exp(k(k-1) / (2 sigma^2))
// The sum is evaluated in log space. q = 0 costs nothing; sigma = 0 with
// q > 0 is an error (unbounded privacy loss).
absl::StatusOr<double> RdpOfStep(double sampling_rate, double noise_multiplier,
                                 int order);

struct AccountantState {
  std::map<int, double> rdp_at_order;
  int64_t steps_recorded = 0;
};

// eps = min over recorded orders of rdp(order) + log(1/delta) / (order - 1).
absl::StatusOr<double> ComposeAndConvert(const AccountantState& state,
                                         double delta);

// Accumulates RDP additively across recorded steps. Per-step costs are cached
// for the most recent (q, sigma) pair, so recording a long run costs one
// vector add per step.
class RdpAccountant {
 public:
  RdpAccountant();

  absl::Status RecordSteps(double sampling_rate, double noise_multiplier,
                           int64_t steps = 1);
  void Reset();

  const AccountantState& state() const { return state_; }
  int64_t steps_recorded() const { return state_.steps_recorded; }

  absl::StatusOr<double> Epsilon(double delta) const;

 private:
  AccountantState state_;
  double cached_rate_ = -1.0;
  double cached_sigma_ = -1.0;
  std::vector<double> cached_rdp_;
};

// Realized epsilon of `steps` identical subsampled-Gaussian steps.
absl::StatusOr<double> EpsilonForSteps(double sampling_rate,
                                       double noise_multiplier, int64_t steps,
                                       double delta);

// Smallest sigma in [0.1, 1000] (bisection on log sigma) whose full-run
// epsilon is <= target_epsilon. If sigma = 0.1 already meets the target it is
// returned as-is. Fails when even sigma = 1000 overspends.
absl::StatusOr<double> CalibrateSigma(double target_epsilon, double delta,
                                      double sampling_rate, int64_t total_steps);

}  // namespace dpfair

#endif  // DPFAIR_RDP_ACCOUNTANT_H_

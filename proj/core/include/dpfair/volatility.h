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

// Stock-volatility regression targets built from daily closing prices.

#ifndef DPFAIR_VOLATILITY_H_
#define DPFAIR_VOLATILITY_H_

#include <cstddef>
#include <cstdint>
#include <istream>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpfair/csv_dataset.h"
#include "dpfair/dataset.h"

namespace dpfair {

struct PriceSeries {
  std::string series_id;
  std::string group;
  // Closing prices P_0, P_1, ... on consecutive trading days; all > 0.
  std::vector<double> prices;
};

// r_t = P_t / P_{t-1} - 1 for t = 1 .. n-1; element i of the result is
// r_{i+1}. Needs at least two strictly positive prices.
absl::StatusOr<std::vector<double>> ReturnSeries(std::span<const double> prices);

// Log volatility over the window ending at day t:
//   v = ln( sqrt( sum_{i=0}^{tau} (r_{t-i} - rbar)^2 / tau ) )
// with rbar the mean of the tau + 1 returns r_{t-tau} .. r_t. Needs tau >= 1
// and t - tau >= 1. A window whose returns are all equal has no defined log
// volatility and is reported as FailedPrecondition.
absl::StatusOr<double> LogVolatility(std::span<const double> prices, size_t t,
                                     int tau);

// Reads (series_id, group, day, close_price) rows. Rows of one series may be
// interleaved with others but their days must be strictly increasing; series
// are returned in order of first appearance.
absl::StatusOr<std::vector<PriceSeries>> ParsePriceSeriesCsv(
    std::istream& in, const std::string& source_name);
absl::StatusOr<std::vector<PriceSeries>> LoadPriceSeriesCsv(
    const std::string& path);

// How event-level regression examples are cut from price series.
struct VolatilityTaskSpec {
  int tau = 3;
  // Trailing returns summarized into the features of each event.
  int lookback = 20;
  // Days between consecutive events within a series.
  int event_stride = 5;
  // Events whose target window ends before this fraction of a series' length
  // go to the training split; the rest go to the test split.
  double train_fraction = 0.8;

  absl::Status Validate() const;
};

// Features of an event on day e: log volatility over the trailing `lookback`
// returns, log volatility over the trailing 5 returns and the return on day e.
// Target: LogVolatility(prices, e + tau + 1, tau), i.e. the tau + 1 returns
// following the event. Groups come from PriceSeries::group, densely indexed by
// first appearance.
struct VolatilitySplit {
  LoadedDataset train;
  LoadedDataset test;
};

absl::StatusOr<VolatilitySplit> BuildVolatilitySplit(
    std::span<const PriceSeries> series, const VolatilityTaskSpec& spec);

// Simulated prices with persistent, group-dependent volatility regimes:
// log sigma_t = mu_g + phi (log sigma_{t-1} - mu_g) + eta_g z_t and
// r_t ~ N(0, sigma_t^2).
struct PriceSimulationSpec {
  std::vector<std::string> group_names = {"man", "woman"};
  std::vector<size_t> series_per_group = {88, 12};
  std::vector<double> base_log_volatility = {-4.0, -4.0};
  std::vector<double> volatility_of_volatility = {0.15, 0.35};
  double persistence = 0.97;
  size_t days = 260;
  uint64_t seed = 0;

  absl::Status Validate() const;
};

absl::StatusOr<std::vector<PriceSeries>> SimulatePriceSeries(
    const PriceSimulationSpec& spec);

}  // namespace dpfair

#endif  // DPFAIR_VOLATILITY_H_

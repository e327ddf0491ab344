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

#include "dpfair/volatility.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "dpfair/rng.h"

namespace dpfair {
namespace {

constexpr int kShortLookback = 5;

absl::Status CheckPrices(std::span<const double> prices) {
  for (size_t i = 0; i < prices.size(); ++i) {
    if (!(prices[i] > 0.0) || !std::isfinite(prices[i])) {
      return absl::InvalidArgumentError(absl::StrCat(
          "price on day ", i, " must be positive and finite, got ", prices[i]));
    }
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<std::vector<double>> ReturnSeries(std::span<const double> prices) {
  if (prices.size() < 2) {
    return absl::InvalidArgumentError("returns need at least two prices");
  }
  if (absl::Status s = CheckPrices(prices); !s.ok()) return s;
  std::vector<double> returns(prices.size() - 1);
  for (size_t t = 1; t < prices.size(); ++t) {
    returns[t - 1] = prices[t] / prices[t - 1] - 1.0;
  }
  return returns;
}

absl::StatusOr<double> LogVolatility(std::span<const double> prices, size_t t,
                                     int tau) {
  if (tau < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("volatility window must be >= 1, got ", tau));
  }
  const size_t window = static_cast<size_t>(tau);
  if (t >= prices.size() || t < window + 1) {
    return absl::OutOfRangeError(absl::StrCat(
        "window of ", tau, " ending at day ", t, " does not fit in ",
        prices.size(), " prices"));
  }
  if (absl::Status s = CheckPrices(prices.subspan(t - window - 1, window + 2));
      !s.ok()) {
    return s;
  }
  std::vector<double> r(window + 1);
  for (size_t i = 0; i <= window; ++i) {
    r[i] = prices[t - i] / prices[t - i - 1] - 1.0;
  }
  bool all_equal = true;
  double mean = 0.0;
  for (double v : r) {
    all_equal = all_equal && v == r[0];
    mean += v;
  }
  if (all_equal) {
    return absl::FailedPreconditionError(absl::StrCat(
        "returns in the window ending at day ", t,
        " have zero variance; log volatility is undefined"));
  }
  mean /= static_cast<double>(r.size());
  double ss = 0.0;
  for (double v : r) ss += (v - mean) * (v - mean);
  return std::log(std::sqrt(ss / static_cast<double>(tau)));
}

absl::StatusOr<std::vector<PriceSeries>> ParsePriceSeriesCsv(
    std::istream& in, const std::string& source_name) {
  std::string line;
  size_t line_no = 0;
  if (!std::getline(in, line)) {
    return absl::InvalidArgumentError(
        absl::StrCat(source_name, ": empty file, expected a header row"));
  }
  ++line_no;
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  absl::StatusOr<std::vector<std::string>> header = SplitCsvLine(line);
  if (!header.ok()) return header.status();
  std::map<std::string, size_t> col;
  for (size_t i = 0; i < header->size(); ++i) col[(*header)[i]] = i;
  for (const char* name : {"series_id", "group", "day", "close_price"}) {
    if (!col.contains(name)) {
      return absl::InvalidArgumentError(
          absl::StrCat(source_name, ": missing column '", name, "' in header"));
    }
  }
  const size_t id_col = col["series_id"], group_col = col["group"],
               day_col = col["day"], price_col = col["close_price"];

  std::vector<PriceSeries> series;
  std::map<std::string, size_t> index;
  std::vector<long long> last_day;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const std::string where = absl::StrCat(source_name, ":", line_no);
    absl::StatusOr<std::vector<std::string>> f = SplitCsvLine(line);
    if (!f.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat(where, ": ", f.status().message()));
    }
    if (f->size() != header->size()) {
      return absl::InvalidArgumentError(absl::StrCat(
          where, ": expected ", header->size(), " fields, got ", f->size()));
    }
    const std::string& day_text = (*f)[day_col];
    long long day = 0;
    auto [dp, dec] =
        std::from_chars(day_text.data(), day_text.data() + day_text.size(), day);
    if (dec != std::errc() || dp != day_text.data() + day_text.size()) {
      return absl::InvalidArgumentError(
          absl::StrCat(where, ": day is not an integer: '", day_text, "'"));
    }
    const std::string& price_text = (*f)[price_col];
    double price = 0.0;
    auto [pp, pec] = std::from_chars(
        price_text.data(), price_text.data() + price_text.size(), price);
    if (pec != std::errc() || pp != price_text.data() + price_text.size() ||
        !(price > 0.0) || !std::isfinite(price)) {
      return absl::InvalidArgumentError(absl::StrCat(
          where, ": close_price must be a positive number, got '", price_text,
          "'"));
    }
    const std::string& id = (*f)[id_col];
    auto it = index.find(id);
    if (it == index.end()) {
      it = index.emplace(id, series.size()).first;
      series.push_back(PriceSeries{id, (*f)[group_col], {}});
      last_day.push_back(day);
    } else {
      PriceSeries& s = series[it->second];
      if (s.group != (*f)[group_col]) {
        return absl::InvalidArgumentError(absl::StrCat(
            where, ": series '", id, "' changes group from '", s.group,
            "' to '", (*f)[group_col], "'"));
      }
      if (day <= last_day[it->second]) {
        return absl::InvalidArgumentError(absl::StrCat(
            where, ": day ", day, " of series '", id,
            "' is not after the previous day ", last_day[it->second]));
      }
      last_day[it->second] = day;
    }
    series[it->second].prices.push_back(price);
  }
  if (series.empty()) {
    return absl::InvalidArgumentError(
        absl::StrCat(source_name, ": no data rows"));
  }
  return series;
}

absl::StatusOr<std::vector<PriceSeries>> LoadPriceSeriesCsv(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open '", path, "'"));
  return ParsePriceSeriesCsv(in, path);
}

absl::Status VolatilityTaskSpec::Validate() const {
  if (tau < 1) return absl::InvalidArgumentError("tau must be >= 1");
  if (lookback < kShortLookback) {
    return absl::InvalidArgumentError(
        absl::StrCat("lookback must be >= ", kShortLookback));
  }
  if (event_stride < 1) {
    return absl::InvalidArgumentError("event_stride must be >= 1");
  }
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    return absl::InvalidArgumentError("train_fraction must lie in (0, 1)");
  }
  return absl::OkStatus();
}

absl::StatusOr<VolatilitySplit> BuildVolatilitySplit(
    std::span<const PriceSeries> series, const VolatilityTaskSpec& spec) {
  if (absl::Status s = spec.Validate(); !s.ok()) return s;
  std::vector<std::string> tokens;
  std::map<std::string, GroupId> ids;
  std::vector<Example> train, test;

  for (const PriceSeries& s : series) {
    auto it = ids.find(s.group);
    if (it == ids.end()) {
      it = ids.emplace(s.group, static_cast<GroupId>(tokens.size())).first;
      tokens.push_back(s.group);
    }
    const size_t n = s.prices.size();
    const double cut = spec.train_fraction * static_cast<double>(n);
    const size_t first = static_cast<size_t>(spec.lookback);
    const size_t horizon = static_cast<size_t>(spec.tau) + 1;
    for (size_t e = first; e + horizon < n; e += spec.event_stride) {
      const bool in_train = static_cast<double>(e + horizon) < cut;
      const bool in_test = static_cast<double>(e) >= cut;
      if (!in_train && !in_test) continue;

      auto wrap = [&](absl::StatusOr<double> v) -> absl::StatusOr<double> {
        if (v.ok()) return v;
        return absl::Status(v.status().code(),
                            absl::StrCat("series '", s.series_id, "': ",
                                         v.status().message()));
      };
      absl::StatusOr<double> long_vol =
          wrap(LogVolatility(s.prices, e, spec.lookback - 1));
      if (!long_vol.ok()) return long_vol.status();
      absl::StatusOr<double> short_vol =
          wrap(LogVolatility(s.prices, e, kShortLookback - 1));
      if (!short_vol.ok()) return short_vol.status();
      absl::StatusOr<double> target =
          wrap(LogVolatility(s.prices, e + horizon, spec.tau));
      if (!target.ok()) return target.status();

      Example ex;
      ex.group = it->second;
      ex.features = {*long_vol, *short_vol, s.prices[e] / s.prices[e - 1] - 1.0};
      ex.label = *target;
      (in_train ? train : test).push_back(std::move(ex));
    }
  }
  if (train.empty() || test.empty()) {
    return absl::InvalidArgumentError(
        "price series are too short to produce both training and test events");
  }
  const int num_groups = static_cast<int>(tokens.size());
  absl::StatusOr<Dataset> train_ds =
      Dataset::Create(std::move(train), num_groups, TaskKind::kRegression);
  if (!train_ds.ok()) return train_ds.status();
  absl::StatusOr<Dataset> test_ds =
      Dataset::Create(std::move(test), num_groups, TaskKind::kRegression);
  if (!test_ds.ok()) return test_ds.status();
  return VolatilitySplit{LoadedDataset{*std::move(train_ds), tokens},
                         LoadedDataset{*std::move(test_ds), tokens}};
}

absl::Status PriceSimulationSpec::Validate() const {
  const size_t g = group_names.size();
  if (g == 0) return absl::InvalidArgumentError("need at least one group");
  if (series_per_group.size() != g || base_log_volatility.size() != g ||
      volatility_of_volatility.size() != g) {
    return absl::InvalidArgumentError(
        "per-group simulation settings must all have one entry per group");
  }
  for (size_t i = 0; i < g; ++i) {
    if (series_per_group[i] < 1) {
      return absl::InvalidArgumentError("every group needs at least one series");
    }
    if (!(volatility_of_volatility[i] >= 0.0)) {
      return absl::InvalidArgumentError("volatility_of_volatility must be >= 0");
    }
  }
  if (!(persistence >= 0.0 && persistence < 1.0)) {
    return absl::InvalidArgumentError("persistence must lie in [0, 1)");
  }
  if (days < 3) return absl::InvalidArgumentError("days must be >= 3");
  return absl::OkStatus();
}

absl::StatusOr<std::vector<PriceSeries>> SimulatePriceSeries(
    const PriceSimulationSpec& spec) {
  if (absl::Status s = spec.Validate(); !s.ok()) return s;
  RngStream rng(spec.seed, "prices");
  std::vector<PriceSeries> out;
  size_t next_id = 0;
  for (size_t g = 0; g < spec.group_names.size(); ++g) {
    const double mu = spec.base_log_volatility[g];
    const double eta = spec.volatility_of_volatility[g];
    for (size_t k = 0; k < spec.series_per_group[g]; ++k) {
      PriceSeries s;
      s.series_id = absl::StrFormat("s%04d", next_id++);
      s.group = spec.group_names[g];
      s.prices.reserve(spec.days);
      double price = 100.0;
      double log_sigma = mu + eta * rng.Normal();
      s.prices.push_back(price);
      for (size_t t = 1; t < spec.days; ++t) {
        log_sigma = mu + spec.persistence * (log_sigma - mu) + eta * rng.Normal();
        const double r = std::max(-0.95, std::exp(log_sigma) * rng.Normal());
        price *= 1.0 + r;
        s.prices.push_back(price);
      }
      out.push_back(std::move(s));
    }
  }
  return out;
}

}  // namespace dpfair

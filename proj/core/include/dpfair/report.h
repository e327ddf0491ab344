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

// Result tables, summary serialization and disparity-versus-tau series.

#ifndef DPFAIR_REPORT_H_
#define DPFAIR_REPORT_H_

#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "dpfair/sweep.h"

namespace dpfair {

enum class TableFormat { kText, kMarkdown };

absl::StatusOr<TableFormat> ParseTableFormat(const std::string& name);

// "0.556 ± 0.021"
std::string FormatMeanStd(double mean, double std);

// Two blocks per tau (performance, then group disparity). Rows are objectives
// and columns privacy levels, both in order of first appearance; a header row
// gives the realized epsilon of each column to 2 decimals.
absl::StatusOr<std::string> EmitTable(const SweepSummary& summary,
                                      TableFormat format);

std::string SummaryToJson(const SweepSummary& summary);
absl::StatusOr<SweepSummary> SummaryFromJson(const std::string& text);

struct DisparityPoint {
  int tau = 0;
  double mean_disparity = 0.0;
  double std_disparity = 0.0;

  bool operator==(const DisparityPoint&) const = default;
};

// One curve per (objective, privacy level), ordered by first appearance;
// points ascend in tau. Failed cells contribute no point.
struct DisparitySeries {
  std::string objective;
  std::string privacy_label;
  std::vector<DisparityPoint> points;

  bool operator==(const DisparitySeries&) const = default;
};

// Needs cells at two or more distinct tau values.
absl::StatusOr<std::vector<DisparitySeries>> DisparityCurves(
    const SweepSummary& summary);

// Header: objective,privacy_label,tau,mean_disparity,std_disparity
std::string CurvesToCsv(const std::vector<DisparitySeries>& series);
std::string CurvesToJson(const std::vector<DisparitySeries>& series);

}  // namespace dpfair

#endif  // DPFAIR_REPORT_H_

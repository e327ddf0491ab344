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

#include "dpfair/report.h"

#include <algorithm>
#include <map>
#include <optional>
#include <set>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "json.hpp"

namespace dpfair {
namespace {

using Json = nlohmann::json;

// Terminal columns taken by a UTF-8 string, one per code point.
size_t DisplayWidth(const std::string& s) {
  size_t width = 0;
  for (unsigned char c : s) width += (c & 0xC0) != 0x80;
  return width;
}

std::string Pad(const std::string& s, size_t width) {
  const size_t w = DisplayWidth(s);
  return w >= width ? s : s + std::string(width - w, ' ');
}

std::string RenderTable(const std::vector<std::vector<std::string>>& rows,
                        TableFormat format) {
  std::vector<size_t> widths;
  for (const auto& row : rows) {
    widths.resize(std::max(widths.size(), row.size()), 0);
    for (size_t c = 0; c < row.size(); ++c) {
      widths[c] = std::max(widths[c], DisplayWidth(row[c]));
    }
  }
  std::string out;
  for (size_t r = 0; r < rows.size(); ++r) {
    std::vector<std::string> cells;
    for (size_t c = 0; c < rows[r].size(); ++c) {
      cells.push_back(Pad(rows[r][c], widths[c]));
    }
    if (format == TableFormat::kMarkdown) {
      absl::StrAppend(&out, "| ", absl::StrJoin(cells, " | "), " |\n");
      if (r == 0) {
        std::vector<std::string> rule;
        for (size_t w : widths) rule.push_back(std::string(std::max<size_t>(w, 3), '-'));
        absl::StrAppend(&out, "|-", absl::StrJoin(rule, "-|-"), "-|\n");
      }
    } else {
      std::string line = absl::StrJoin(cells, "  ");
      while (!line.empty() && line.back() == ' ') line.pop_back();
      absl::StrAppend(&out, line, "\n");
    }
  }
  return out;
}

template <typename T>
void AppendUnique(std::vector<T>& v, const T& x) {
  if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
}

Json OptionalJson(const std::optional<double>& v) { return v ? Json(*v) : Json(); }

std::optional<double> OptionalDouble(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

}  // namespace

absl::StatusOr<TableFormat> ParseTableFormat(const std::string& name) {
  if (name == "text") return TableFormat::kText;
  if (name == "markdown" || name == "md") return TableFormat::kMarkdown;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown table format '", name, "' (text, markdown)"));
}

std::string FormatMeanStd(double mean, double std) {
  return absl::StrFormat("%.3f ± %.3f", mean, std);
}

absl::StatusOr<std::string> EmitTable(const SweepSummary& summary,
                                      TableFormat format) {
  if (summary.cells.empty()) {
    return absl::InvalidArgumentError("cannot emit a table for an empty summary");
  }
  std::vector<std::optional<int>> taus;
  std::vector<std::string> objectives, labels;
  for (const CellSummary& cell : summary.cells) {
    AppendUnique(taus, cell.tau);
    AppendUnique(objectives, cell.objective);
    AppendUnique(labels, cell.privacy_label);
  }
  const bool markdown = format == TableFormat::kMarkdown;
  std::string out;
  absl::StrAppend(&out, markdown ? "## " : "", summary.name, "\n");
  absl::StrAppend(&out, "metric: ", summary.metric,
                  summary.higher_is_better ? " (higher is better)"
                                           : " (lower is better)",
                  "; disparity: best minus worst group\n");

  for (const std::optional<int>& tau : taus) {
    std::map<std::pair<std::string, std::string>, const CellSummary*> by_key;
    for (const CellSummary& cell : summary.cells) {
      if (cell.tau == tau) by_key[{cell.objective, cell.privacy_label}] = &cell;
    }
    std::vector<std::string> header = {"objective"};
    std::vector<std::string> eps_row = {"realized ε"};
    for (const std::string& label : labels) {
      header.push_back(label);
      std::vector<std::string> values;
      for (const std::string& objective : objectives) {
        auto it = by_key.find({objective, label});
        if (it != by_key.end() && it->second->realized_epsilon_mean) {
          AppendUnique(values, absl::StrFormat("%.2f", *it->second->realized_epsilon_mean));
        }
      }
      eps_row.push_back(values.empty() ? "-" : absl::StrJoin(values, "/"));
    }
    for (int block = 0; block < 2; ++block) {
      std::vector<std::vector<std::string>> rows = {header, eps_row};
      for (const std::string& objective : objectives) {
        std::vector<std::string> row = {objective};
        for (const std::string& label : labels) {
          auto it = by_key.find({objective, label});
          if (it == by_key.end()) {
            row.push_back("-");
            continue;
          }
          const CellSummary& c = *it->second;
          if (c.status == "failed") {
            row.push_back("failed");
            continue;
          }
          std::string cell = block == 0 ? FormatMeanStd(c.score_mean, c.score_std)
                                        : FormatMeanStd(c.disparity_mean, c.disparity_std);
          if (c.status == "partial") {
            absl::StrAppend(&cell, " (", c.runs - c.failed_runs, "/", c.runs, ")");
          }
          row.push_back(cell);
        }
        rows.push_back(std::move(row));
      }
      std::string title = block == 0 ? "Performance" : "Group disparity";
      if (tau) absl::StrAppend(&title, ", tau = ", *tau);
      absl::StrAppend(&out, "\n", markdown ? "### " : "", title, "\n");
      if (markdown) absl::StrAppend(&out, "\n");
      absl::StrAppend(&out, RenderTable(rows, format));
    }
  }
  return out;
}

std::string SummaryToJson(const SweepSummary& summary) {
  Json cells = Json::array();
  for (const CellSummary& c : summary.cells) {
    cells.push_back(Json{{"cell_index", c.cell_index},
                         {"objective", c.objective},
                         {"privacy_label", c.privacy_label},
                         {"target_epsilon", OptionalJson(c.target_epsilon)},
                         {"tau", c.tau ? Json(*c.tau) : Json()},
                         {"runs", c.runs},
                         {"failed_runs", c.failed_runs},
                         {"score_mean", c.score_mean},
                         {"score_std", c.score_std},
                         {"disparity_mean", c.disparity_mean},
                         {"disparity_std", c.disparity_std},
                         {"realized_epsilon_mean", OptionalJson(c.realized_epsilon_mean)},
                         {"noise_multiplier", OptionalJson(c.noise_multiplier)},
                         {"status", c.status}});
  }
  Json j{{"name", summary.name},
         {"fingerprint", summary.fingerprint},
         {"metric", summary.metric},
         {"higher_is_better", summary.higher_is_better},
         {"cells", cells}};
  return j.dump(2) + "\n";
}

absl::StatusOr<SweepSummary> SummaryFromJson(const std::string& text) {
  try {
    const Json j = Json::parse(text);
    SweepSummary s;
    s.name = j.at("name").get<std::string>();
    s.fingerprint = j.at("fingerprint").get<std::string>();
    s.metric = j.at("metric").get<std::string>();
    s.higher_is_better = j.at("higher_is_better").get<bool>();
    for (const Json& cj : j.at("cells")) {
      CellSummary c;
      c.cell_index = cj.at("cell_index").get<int>();
      c.objective = cj.at("objective").get<std::string>();
      c.privacy_label = cj.at("privacy_label").get<std::string>();
      c.target_epsilon = OptionalDouble(cj, "target_epsilon");
      if (!cj.at("tau").is_null()) c.tau = cj.at("tau").get<int>();
      c.runs = cj.at("runs").get<int>();
      c.failed_runs = cj.at("failed_runs").get<int>();
      c.score_mean = cj.at("score_mean").get<double>();
      c.score_std = cj.at("score_std").get<double>();
      c.disparity_mean = cj.at("disparity_mean").get<double>();
      c.disparity_std = cj.at("disparity_std").get<double>();
      c.realized_epsilon_mean = OptionalDouble(cj, "realized_epsilon_mean");
      c.noise_multiplier = OptionalDouble(cj, "noise_multiplier");
      c.status = cj.at("status").get<std::string>();
      s.cells.push_back(std::move(c));
    }
    return s;
  } catch (const Json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed summary json: ", std::string(e.what())));
  }
}

absl::StatusOr<std::vector<DisparitySeries>> DisparityCurves(
    const SweepSummary& summary) {
  std::set<int> taus;
  for (const CellSummary& c : summary.cells) {
    if (c.tau) taus.insert(*c.tau);
  }
  if (taus.size() < 2) {
    return absl::InvalidArgumentError(
        "disparity curves need results at two or more tau values");
  }
  std::vector<DisparitySeries> series;
  for (const CellSummary& c : summary.cells) {
    if (!c.tau) continue;
    auto it = std::find_if(series.begin(), series.end(), [&](const auto& s) {
      return s.objective == c.objective && s.privacy_label == c.privacy_label;
    });
    if (it == series.end()) {
      series.push_back({c.objective, c.privacy_label, {}});
      it = series.end() - 1;
    }
    if (c.status == "failed") continue;
    it->points.push_back({*c.tau, c.disparity_mean, c.disparity_std});
  }
  for (DisparitySeries& s : series) {
    std::stable_sort(s.points.begin(), s.points.end(),
                     [](const auto& a, const auto& b) { return a.tau < b.tau; });
  }
  return series;
}

std::string CurvesToCsv(const std::vector<DisparitySeries>& series) {
  std::string out = "objective,privacy_label,tau,mean_disparity,std_disparity\n";
  auto quote = [](const std::string& s) {
    if (s.find_first_of(",\"") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  };
  for (const DisparitySeries& s : series) {
    for (const DisparityPoint& p : s.points) {
      absl::StrAppend(&out, quote(s.objective), ",", quote(s.privacy_label), ",",
                      p.tau, ",", absl::StrFormat("%.17g", p.mean_disparity), ",",
                      absl::StrFormat("%.17g", p.std_disparity), "\n");
    }
  }
  return out;
}

std::string CurvesToJson(const std::vector<DisparitySeries>& series) {
  Json out = Json::array();
  for (const DisparitySeries& s : series) {
    Json points = Json::array();
    for (const DisparityPoint& p : s.points) {
      points.push_back(Json{{"tau", p.tau},
                            {"mean_disparity", p.mean_disparity},
                            {"std_disparity", p.std_disparity}});
    }
    out.push_back(Json{{"objective", s.objective},
                       {"privacy_label", s.privacy_label},
                       {"points", points}});
  }
  return out.dump(2) + "\n";
}

}  // namespace dpfair

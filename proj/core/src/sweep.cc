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

#include "dpfair/sweep.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>
#include <tuple>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "dpfair/group_distribution.h"
#include "dpfair/metrics.h"
#include "dpfair/rdp_accountant.h"
#include "dpfair/report.h"
#include "json.hpp"

namespace dpfair {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::json;

Json OptionalJson(const std::optional<double>& v) { return v ? Json(*v) : Json(); }

std::optional<double> OptionalDouble(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

absl::Status WriteFile(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    return absl::PermissionDeniedError(
        absl::StrCat("cannot write '", path.string(), "'"));
  }
  out << contents;
  out.close();
  if (!out) {
    return absl::DataLossError(absl::StrCat("failed writing '", path.string(), "'"));
  }
  return absl::OkStatus();
}

absl::StatusOr<std::string> ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open '", path.string(), "'"));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// One run of the grid, before it executes.
struct RunPlan {
  RunReport report;
  size_t split = 0;  // Index into the loaded splits (one per tau).
  size_t level = 0;
  Objective objective = Objective::kErm;
};

struct LoadedSplit {
  std::optional<int> tau;
  absl::StatusOr<ExperimentData> data = absl::UnknownError("not loaded");
  std::optional<Model> model;
  absl::Status model_status;
};

void MarkFailed(RunReport& report, const absl::Status& status) {
  report.status = "failed";
  report.error = std::string(status.message());
}

void ExecuteRun(const ExperimentConfig& config, const LoadedSplit& split,
                const std::optional<double>& sigma, const absl::Status& sigma_status,
                RunPlan& plan) {
  RunReport& report = plan.report;
  const auto start = std::chrono::steady_clock::now();
  auto finish = [&] {
    report.wall_clock_seconds = std::chrono::duration<double>(
        std::chrono::steady_clock::now() - start).count();
  };
  if (!split.data.ok()) {
    MarkFailed(report, split.data.status());
    return finish();
  }
  if (!split.model_status.ok()) {
    MarkFailed(report, split.model_status);
    return finish();
  }
  if (!sigma_status.ok()) {
    MarkFailed(report, sigma_status);
    return finish();
  }
  const Dataset& train = split.data->train.dataset;
  const Dataset& test = split.data->test.dataset;
  report.group_tokens = split.data->train.group_tokens;
  report.train_size = train.size();
  report.test_size = test.size();

  const PrivacyLevel& level = config.privacy_levels[plan.level];
  TrainConfig tc = config.training;
  tc.objective = plan.objective;
  tc.seed = report.seed;
  tc.stream_label = absl::StrCat(report.objective, "/", level.label, "/",
                                 report.seed_index);
  if (report.tau) absl::StrAppend(&tc.stream_label, "/tau", *report.tau);
  tc.privacy.reset();
  if (level.is_private()) {
    PrivacySpec ps;
    ps.target_epsilon = level.target_epsilon;
    ps.delta = config.delta;
    ps.clipping_bound = config.EffectiveClippingBound();
    ps.noise_multiplier = *sigma;
    tc.privacy = ps;
  }

  absl::StatusOr<TrainResult> result = Train(*split.model, train, tc);
  if (!result.ok()) {
    MarkFailed(report, result.status());
    return finish();
  }
  absl::StatusOr<GroupScores> scores =
      EvaluateGroups(*split.model, result->params, test, config.metric);
  if (!scores.ok()) {
    MarkFailed(report, scores.status());
    return finish();
  }
  absl::StatusOr<DisparityReport> disparity = GroupDisparity(*scores);
  if (!disparity.ok()) {
    MarkFailed(report, disparity.status());
    return finish();
  }
  absl::StatusOr<double> overall =
      EvaluateOverall(*split.model, result->params, test, config.metric);
  if (!overall.ok()) {
    MarkFailed(report, overall.status());
    return finish();
  }
  const TrainTrace& trace = result->trace;
  report.overall_score = *overall;
  report.group_scores = scores->per_group;
  report.disparity = disparity->delta;
  report.best_group = disparity->best_group;
  report.worst_group = disparity->worst_group;
  report.epoch_losses = trace.epoch_losses;
  report.final_group_weights = trace.final_group_weights;
  report.optimizer_steps = trace.optimizer_steps;
  report.accountant_steps = trace.accountant_steps;
  report.sampling_rate = trace.sampling_rate;
  report.noise_multiplier = trace.noise_multiplier;
  report.realized_epsilon = trace.realized_epsilon;
  finish();
}

double PopulationStd(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

double Mean(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

}  // namespace

std::string RunReportToJson(const RunReport& r) {
  Json j{{"experiment", r.experiment},
         {"fingerprint", r.fingerprint},
         {"objective", r.objective},
         {"privacy_label", r.privacy_label},
         {"target_epsilon", OptionalJson(r.target_epsilon)},
         {"noise_multiplier", OptionalJson(r.noise_multiplier)},
         {"realized_epsilon", OptionalJson(r.realized_epsilon)},
         {"seed", r.seed},
         {"seed_index", r.seed_index},
         {"cell_index", r.cell_index},
         {"tau", r.tau ? Json(*r.tau) : Json()},
         {"metric", r.metric},
         {"overall_score", r.overall_score},
         {"group_scores", r.group_scores},
         {"group_tokens", r.group_tokens},
         {"disparity",
          {{"delta", r.disparity},
           {"best_group", r.best_group},
           {"worst_group", r.worst_group}}},
         {"trace",
          {{"epoch_losses", r.epoch_losses},
           {"final_group_weights", r.final_group_weights},
           {"optimizer_steps", r.optimizer_steps},
           {"accountant_steps", r.accountant_steps},
           {"sampling_rate", OptionalJson(r.sampling_rate)}}},
         {"train_size", r.train_size},
         {"test_size", r.test_size},
         {"status", r.status},
         {"error", r.error}};
  return j.dump(2) + "\n";
}

absl::StatusOr<RunReport> RunReportFromJson(const std::string& text) {
  try {
    const Json j = Json::parse(text);
    RunReport r;
    r.experiment = j.at("experiment").get<std::string>();
    r.fingerprint = j.at("fingerprint").get<std::string>();
    r.objective = j.at("objective").get<std::string>();
    r.privacy_label = j.at("privacy_label").get<std::string>();
    r.target_epsilon = OptionalDouble(j, "target_epsilon");
    r.noise_multiplier = OptionalDouble(j, "noise_multiplier");
    r.realized_epsilon = OptionalDouble(j, "realized_epsilon");
    r.seed = j.at("seed").get<uint64_t>();
    r.seed_index = j.at("seed_index").get<int>();
    r.cell_index = j.at("cell_index").get<int>();
    if (!j.at("tau").is_null()) r.tau = j.at("tau").get<int>();
    r.metric = j.at("metric").get<std::string>();
    r.overall_score = j.at("overall_score").get<double>();
    r.group_scores = j.at("group_scores").get<std::vector<double>>();
    r.group_tokens = j.at("group_tokens").get<std::vector<std::string>>();
    const Json& d = j.at("disparity");
    r.disparity = d.at("delta").get<double>();
    r.best_group = d.at("best_group").get<int>();
    r.worst_group = d.at("worst_group").get<int>();
    const Json& t = j.at("trace");
    r.epoch_losses = t.at("epoch_losses").get<std::vector<double>>();
    r.final_group_weights = t.at("final_group_weights").get<std::vector<double>>();
    r.optimizer_steps = t.at("optimizer_steps").get<int64_t>();
    r.accountant_steps = t.at("accountant_steps").get<int64_t>();
    r.sampling_rate = OptionalDouble(t, "sampling_rate");
    r.train_size = j.at("train_size").get<size_t>();
    r.test_size = j.at("test_size").get<size_t>();
    r.status = j.at("status").get<std::string>();
    r.error = j.at("error").get<std::string>();
    return r;
  } catch (const Json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed run report: ", std::string(e.what())));
  }
}

std::string RunFileName(const RunReport& report) {
  std::string name =
      absl::StrCat(report.objective, "__", SanitizeLabel(report.privacy_label));
  if (report.tau) absl::StrAppend(&name, "__tau", *report.tau);
  absl::StrAppend(&name, "__seed", report.seed_index, ".json");
  return name;
}

bool SweepSummary::all_ok() const {
  return std::all_of(cells.begin(), cells.end(),
                     [](const CellSummary& c) { return c.status == "ok"; });
}

absl::StatusOr<SweepSummary> Aggregate(std::vector<RunReport> reports) {
  if (reports.empty()) return absl::InvalidArgumentError("no run reports to aggregate");
  std::sort(reports.begin(), reports.end(), [](const RunReport& a, const RunReport& b) {
    return std::tie(a.cell_index, a.seed_index) < std::tie(b.cell_index, b.seed_index);
  });
  SweepSummary summary;
  summary.name = reports.front().experiment;
  summary.fingerprint = reports.front().fingerprint;
  summary.metric = reports.front().metric;
  absl::StatusOr<MetricKind> kind = ParseMetricKind(summary.metric);
  if (!kind.ok()) return kind.status();
  summary.higher_is_better = HigherIsBetter(*kind);

  for (size_t i = 0; i < reports.size();) {
    size_t end = i;
    while (end < reports.size() && reports[end].cell_index == reports[i].cell_index) {
      ++end;
    }
    const RunReport& first = reports[i];
    CellSummary cell;
    cell.cell_index = first.cell_index;
    cell.objective = first.objective;
    cell.privacy_label = first.privacy_label;
    cell.target_epsilon = first.target_epsilon;
    cell.tau = first.tau;
    std::vector<double> scores, disparities, epsilons;
    for (size_t k = i; k < end; ++k) {
      const RunReport& r = reports[k];
      if (r.fingerprint != summary.fingerprint) {
        return absl::FailedPreconditionError(absl::StrCat(
            "run reports come from different configs (", summary.fingerprint,
            " vs ", r.fingerprint, ")"));
      }
      if (r.objective != first.objective || r.privacy_label != first.privacy_label ||
          r.tau != first.tau) {
        return absl::FailedPreconditionError(
            absl::StrCat("inconsistent runs in cell ", first.cell_index));
      }
      if (k > i && r.seed_index == reports[k - 1].seed_index) {
        return absl::FailedPreconditionError(absl::StrCat(
            "duplicate seed index ", r.seed_index, " in cell ", first.cell_index));
      }
      ++cell.runs;
      if (!r.ok()) {
        ++cell.failed_runs;
        continue;
      }
      scores.push_back(r.overall_score);
      disparities.push_back(r.disparity);
      if (r.realized_epsilon) epsilons.push_back(*r.realized_epsilon);
      if (!cell.noise_multiplier) cell.noise_multiplier = r.noise_multiplier;
    }
    if (!scores.empty()) {
      cell.score_mean = Mean(scores);
      cell.score_std = PopulationStd(scores, cell.score_mean);
      cell.disparity_mean = Mean(disparities);
      cell.disparity_std = PopulationStd(disparities, cell.disparity_mean);
    }
    if (!epsilons.empty()) cell.realized_epsilon_mean = Mean(epsilons);
    cell.status = cell.failed_runs == 0            ? "ok"
                  : cell.failed_runs == cell.runs ? "failed"
                                                  : "partial";
    summary.cells.push_back(std::move(cell));
    i = end;
  }
  return summary;
}

absl::StatusOr<SweepResult> RunSweep(const ExperimentConfig& config,
                                     const SweepOptions& options) {
  if (absl::Status s = config.Validate(); !s.ok()) return s;
  const std::string fingerprint = ConfigFingerprint(config);
  const std::string out_dir =
      options.output_dir.empty() ? config.output_dir : options.output_dir;
  const int jobs = options.jobs > 0 ? options.jobs : config.jobs;
  const auto sweep_start = std::chrono::steady_clock::now();

  std::vector<LoadedSplit> splits(std::max<size_t>(1, config.taus.size()));
  for (size_t s = 0; s < config.taus.size(); ++s) splits[s].tau = config.taus[s];
  for (LoadedSplit& split : splits) {
    split.data = LoadExperimentData(config, split.tau);
    if (!split.data.ok()) continue;
    absl::StatusOr<Model> model =
        Model::Create(config.model_family, split.data->train.dataset.feature_dim(),
                      config.hidden_size, config.data.task());
    if (model.ok()) {
      split.model = *std::move(model);
    } else {
      split.model_status = model.status();
    }
  }

  // Sigma per (split, level), shared by every seed and objective.
  std::map<std::tuple<size_t, size_t, int64_t>, absl::StatusOr<double>> calibrated;
  std::vector<std::vector<std::pair<std::optional<double>, absl::Status>>> sigmas(
      splits.size());
  for (size_t s = 0; s < splits.size(); ++s) {
    for (size_t l = 0; l < config.privacy_levels.size(); ++l) {
      const PrivacyLevel& level = config.privacy_levels[l];
      if (!level.is_private()) {
        sigmas[s].push_back({std::nullopt, absl::OkStatus()});
      } else if (level.noise_multiplier) {
        sigmas[s].push_back({level.noise_multiplier, absl::OkStatus()});
      } else if (!splits[s].data.ok()) {
        sigmas[s].push_back({std::nullopt, absl::OkStatus()});
      } else {
        const size_t n = splits[s].data->train.dataset.size();
        const int64_t steps = TotalSteps(config.training, n);
        auto key = std::make_tuple(l, n, steps);
        auto it = calibrated.find(key);
        if (it == calibrated.end()) {
          it = calibrated
                   .emplace(key, CalibrateSigma(*level.target_epsilon, config.delta,
                                                SamplingRate(config.training, n),
                                                steps))
                   .first;
        }
        if (it->second.ok()) {
          sigmas[s].push_back({*it->second, absl::OkStatus()});
        } else {
          sigmas[s].push_back({std::nullopt, it->second.status()});
        }
      }
    }
  }

  std::vector<RunPlan> plans;
  int cell_index = 0;
  for (size_t s = 0; s < splits.size(); ++s) {
    for (Objective objective : config.objectives) {
      for (size_t l = 0; l < config.privacy_levels.size(); ++l) {
        const PrivacyLevel& level = config.privacy_levels[l];
        for (size_t k = 0; k < config.seeds.size(); ++k) {
          RunPlan plan;
          plan.split = s;
          plan.level = l;
          plan.objective = objective;
          RunReport& r = plan.report;
          r.experiment = config.name;
          r.fingerprint = fingerprint;
          r.objective = ObjectiveName(objective);
          r.privacy_label = level.label;
          r.target_epsilon = level.target_epsilon;
          r.seed = config.seeds[k];
          r.seed_index = static_cast<int>(k);
          r.cell_index = cell_index;
          r.tau = splits[s].tau;
          r.metric = MetricKindName(config.metric);
          plans.push_back(std::move(plan));
        }
        ++cell_index;
      }
    }
  }

  fs::path runs_dir;
  if (options.persist) {
    std::error_code ec;
    runs_dir = fs::path(out_dir) / "runs";
    fs::create_directories(runs_dir, ec);
    if (ec) {
      return absl::PermissionDeniedError(absl::StrCat(
          "cannot create '", runs_dir.string(), "': ", ec.message()));
    }
    for (const auto& entry : fs::directory_iterator(runs_dir, ec)) {
      if (entry.path().extension() == ".json") fs::remove(entry.path(), ec);
    }
  }

  std::atomic<size_t> next{0};
  std::vector<absl::Status> write_status(plans.size());
  auto worker = [&] {
    for (size_t i = next.fetch_add(1); i < plans.size(); i = next.fetch_add(1)) {
      RunPlan& plan = plans[i];
      const auto& [sigma, sigma_status] = sigmas[plan.split][plan.level];
      ExecuteRun(config, splits[plan.split], sigma, sigma_status, plan);
      if (options.persist) {
        write_status[i] = WriteFile(runs_dir / RunFileName(plan.report),
                                    RunReportToJson(plan.report));
      }
    }
  };
  const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(plans.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  for (const absl::Status& s : write_status) {
    if (!s.ok()) return s;
  }

  SweepResult result;
  result.output_dir = out_dir;
  for (RunPlan& plan : plans) result.reports.push_back(plan.report);
  absl::StatusOr<SweepSummary> summary = Aggregate(result.reports);
  if (!summary.ok()) return summary.status();
  result.summary = *std::move(summary);

  if (options.persist) {
    const fs::path out(out_dir);
    if (absl::Status s = WriteFile(out / "summary.json", SummaryToJson(result.summary));
        !s.ok()) {
      return s;
    }
    Json groups = Json::array();
    for (const LoadedSplit& split : splits) {
      Json g{{"tau", split.tau ? Json(*split.tau) : Json()}};
      if (split.data.ok()) {
        g["group_tokens"] = split.data->train.group_tokens;
        g["train_counts"] = ComputeGroupDistribution(split.data->train.dataset).counts;
        g["test_counts"] = ComputeGroupDistribution(split.data->test.dataset).counts;
      } else {
        g["error"] = std::string(split.data.status().message());
      }
      groups.push_back(g);
    }
    if (absl::Status s = WriteFile(out / "groups.json", groups.dump(2) + "\n"); !s.ok()) {
      return s;
    }
    Json timings = Json::object();
    Json per_run = Json::object();
    for (const RunReport& r : result.reports) {
      per_run[RunFileName(r)] = r.wall_clock_seconds;
    }
    timings["runs"] = per_run;
    timings["total_seconds"] = std::chrono::duration<double>(
        std::chrono::steady_clock::now() - sweep_start).count();
    if (absl::Status s = WriteFile(out / "timings.json", timings.dump(2) + "\n");
        !s.ok()) {
      return s;
    }
  }
  return result;
}

absl::StatusOr<std::vector<RunReport>> LoadRunReports(const std::string& dir) {
  const fs::path runs_dir = fs::path(dir) / "runs";
  std::error_code ec;
  if (!fs::is_directory(runs_dir, ec)) {
    return absl::NotFoundError(
        absl::StrCat("no runs directory under '", dir, "'"));
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(runs_dir, ec)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<RunReport> reports;
  for (const fs::path& file : files) {
    absl::StatusOr<std::string> text = ReadFile(file);
    if (!text.ok()) return text.status();
    absl::StatusOr<RunReport> report = RunReportFromJson(*text);
    if (!report.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat(file.string(), ": ", report.status().message()));
    }
    reports.push_back(*std::move(report));
  }
  if (reports.empty()) {
    return absl::NotFoundError(absl::StrCat("no run reports under '", dir, "'"));
  }
  return reports;
}

}  // namespace dpfair

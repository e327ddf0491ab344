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

// dpfair: run privacy x fairness sweeps and report on their artifacts.
//
// Exit codes: 0 success, 1 config or usage error, 2 some cells failed,
// 3 fatal error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/strings/str_format.h"
#include "dpfair/csv_dataset.h"
#include "dpfair/experiment_config.h"
#include "dpfair/group_distribution.h"
#include "dpfair/objectives.h"
#include "dpfair/rdp_accountant.h"
#include "dpfair/report.h"
#include "dpfair/sweep.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitPartial = 2;
constexpr int kExitFatal = 3;

int Fail(int code, const absl::Status& status) {
  std::cerr << "dpfair: " << status.message() << "\n";
  return code;
}

int WriteOrPrint(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return kExitOk;
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) {
    std::cerr << "dpfair: cannot write '" << path << "'\n";
    return kExitFatal;
  }
  return kExitOk;
}

int PrintSummary(const dpfair::SweepSummary& summary, const std::string& format) {
  if (format == "json") {
    std::cout << dpfair::SummaryToJson(summary);
  } else {
    absl::StatusOr<dpfair::TableFormat> f = dpfair::ParseTableFormat(format);
    if (!f.ok()) return Fail(kExitConfig, f.status());
    absl::StatusOr<std::string> table = dpfair::EmitTable(summary, *f);
    if (!table.ok()) return Fail(kExitFatal, table.status());
    std::cout << *table;
  }
  return summary.all_ok() ? kExitOk : kExitPartial;
}

absl::StatusOr<dpfair::SweepSummary> SummaryFromDir(const std::string& dir) {
  absl::StatusOr<std::vector<dpfair::RunReport>> reports = dpfair::LoadRunReports(dir);
  if (!reports.ok()) return reports.status();
  return dpfair::Aggregate(*std::move(reports));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private training and group fairness sweeps"};
  app.require_subcommand(1);

  std::string config_path, out_dir, format = "text";
  int jobs = 0;
  CLI::App* run = app.add_subcommand("run", "Run the sweep described by a config file");
  run->add_option("-c,--config", config_path, "YAML experiment config")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("-o,--out", out_dir, "Output directory (overrides the config)");
  run->add_option("-j,--jobs", jobs, "Parallel runs (overrides the config)")
      ->check(CLI::PositiveNumber);
  run->add_option("-f,--format", format, "Table format: text, markdown or json")
      ->check(CLI::IsMember({"text", "markdown", "json"}));

  std::string report_dir;
  CLI::App* report = app.add_subcommand(
      "report", "Re-aggregate persisted run reports and print the tables");
  report->add_option("-d,--dir", report_dir, "Sweep output directory")->required();
  report->add_option("-f,--format", format, "Table format: text, markdown or json")
      ->check(CLI::IsMember({"text", "markdown", "json"}));

  double epsilon = 0.0, delta = dpfair::kDefaultDelta;
  std::optional<double> sampling_rate;
  std::optional<int64_t> steps;
  std::optional<size_t> dataset_size, batch_size;
  int epochs = 10;
  CLI::App* calibrate = app.add_subcommand(
      "calibrate", "Print the noise multiplier that meets a target epsilon");
  calibrate->add_option("-e,--epsilon", epsilon, "Target epsilon")
      ->required()
      ->check(CLI::PositiveNumber);
  calibrate->add_option("--delta", delta, "Target delta")->check(CLI::Range(0.0, 1.0));
  auto* q_opt = calibrate->add_option("-q,--sampling-rate", sampling_rate,
                                      "Poisson sampling rate per step")
                    ->check(CLI::Range(0.0, 1.0));
  auto* steps_opt = calibrate->add_option("-t,--steps", steps, "Number of steps")
                        ->check(CLI::PositiveNumber);
  auto* n_opt = calibrate->add_option("-n,--dataset-size", dataset_size,
                                      "Training examples (with --batch-size)")
                    ->check(CLI::PositiveNumber);
  auto* b_opt = calibrate->add_option("-b,--batch-size", batch_size, "Expected batch size")
                    ->check(CLI::PositiveNumber);
  calibrate->add_option("--epochs", epochs, "Epochs (with --dataset-size)")
      ->check(CLI::PositiveNumber);
  q_opt->needs(steps_opt)->excludes(n_opt)->excludes(b_opt);
  steps_opt->needs(q_opt);
  n_opt->needs(b_opt);
  b_opt->needs(n_opt);

  std::string curves_dir, curves_format = "csv", curves_out;
  CLI::App* curves = app.add_subcommand(
      "curves", "Emit group disparity against tau, one series per privacy level");
  curves->add_option("-d,--dir", curves_dir, "Sweep output directory")->required();
  curves->add_option("-f,--format", curves_format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  curves->add_option("-o,--output", curves_out, "Write to a file instead of stdout");

  std::string csv_path, group_column, label_column, task = "classification";
  std::vector<std::string> feature_columns;
  CLI::App* groups = app.add_subcommand("groups", "Count examples per group in a CSV file");
  groups->add_option("--csv", csv_path, "Input CSV")->required()->check(CLI::ExistingFile);
  groups->add_option("--features", feature_columns, "Feature columns")
      ->required()
      ->delimiter(',');
  groups->add_option("--group", group_column, "Group column")->required();
  groups->add_option("--label", label_column, "Label column")->required();
  groups->add_option("--task", task, "classification or regression")
      ->check(CLI::IsMember({"classification", "regression"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  if (*run) {
    absl::StatusOr<dpfair::ExperimentConfig> config =
        dpfair::LoadExperimentConfig(config_path);
    if (!config.ok()) return Fail(kExitConfig, config.status());
    dpfair::SweepOptions options;
    options.output_dir = out_dir;
    options.jobs = jobs;
    absl::StatusOr<dpfair::SweepResult> result = dpfair::RunSweep(*config, options);
    if (!result.ok()) return Fail(kExitFatal, result.status());
    for (const dpfair::RunReport& r : result->reports) {
      if (!r.ok()) {
        std::cerr << "dpfair: run " << dpfair::RunFileName(r)
                  << " failed: " << r.error << "\n";
      }
    }
    std::cerr << "dpfair: " << result->reports.size() << " runs written to "
              << result->output_dir << "\n";
    return PrintSummary(result->summary, format);
  }

  if (*report) {
    absl::StatusOr<dpfair::SweepSummary> summary = SummaryFromDir(report_dir);
    if (!summary.ok()) return Fail(kExitFatal, summary.status());
    return PrintSummary(*summary, format);
  }

  if (*calibrate) {
    double q;
    int64_t total_steps;
    if (sampling_rate && steps) {
      q = *sampling_rate;
      total_steps = *steps;
    } else if (dataset_size && batch_size) {
      dpfair::TrainConfig tc;
      tc.batch_size = *batch_size;
      tc.epochs = epochs;
      q = dpfair::SamplingRate(tc, *dataset_size);
      total_steps = dpfair::TotalSteps(tc, *dataset_size);
    } else {
      std::cerr << "dpfair: give either --sampling-rate and --steps or "
                   "--dataset-size and --batch-size\n";
      return kExitConfig;
    }
    absl::StatusOr<double> sigma =
        dpfair::CalibrateSigma(epsilon, delta, q, total_steps);
    if (!sigma.ok()) return Fail(kExitFatal, sigma.status());
    absl::StatusOr<double> realized =
        dpfair::EpsilonForSteps(q, *sigma, total_steps, delta);
    if (!realized.ok()) return Fail(kExitFatal, realized.status());
    std::cout << absl::StrFormat(
        "noise_multiplier=%.6f realized_epsilon=%.4f sampling_rate=%.6g steps=%d "
        "delta=%g\n",
        *sigma, *realized, q, total_steps, delta);
    return kExitOk;
  }

  if (*curves) {
    absl::StatusOr<dpfair::SweepSummary> summary = SummaryFromDir(curves_dir);
    if (!summary.ok()) return Fail(kExitFatal, summary.status());
    absl::StatusOr<std::vector<dpfair::DisparitySeries>> series =
        dpfair::DisparityCurves(*summary);
    if (!series.ok()) return Fail(kExitConfig, series.status());
    const std::string text = curves_format == "json" ? dpfair::CurvesToJson(*series)
                                                     : dpfair::CurvesToCsv(*series);
    return WriteOrPrint(text, curves_out);
  }

  if (*groups) {
    dpfair::CsvSchema schema{feature_columns, group_column, label_column,
                             task == "regression" ? dpfair::TaskKind::kRegression
                                                  : dpfair::TaskKind::kClassification};
    absl::StatusOr<dpfair::LoadedDataset> loaded = dpfair::LoadCsvDataset(csv_path, schema);
    if (!loaded.ok()) return Fail(kExitConfig, loaded.status());
    const dpfair::GroupDistribution dist =
        dpfair::ComputeGroupDistribution(loaded->dataset);
    std::cout << "group,count,fraction\n";
    for (size_t g = 0; g < dist.counts.size(); ++g) {
      std::cout << absl::StrFormat("%s,%d,%.6f\n", loaded->group_tokens[g],
                                   dist.counts[g], dist.Fraction(static_cast<int>(g)));
    }
    std::cout << absl::StrFormat("total,%d,1.000000\n", dist.total);
    return kExitOk;
  }
  return kExitConfig;
}

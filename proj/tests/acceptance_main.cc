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

// Acceptance suite: one PASS/FAIL line per criterion; exits non-zero when any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "absl/strings/str_format.h"
#include "dpfair/csv_dataset.h"
#include "dpfair/dp_sgd.h"
#include "dpfair/experiment_config.h"
#include "dpfair/group_distribution.h"
#include "dpfair/metrics.h"
#include "dpfair/model.h"
#include "dpfair/objectives.h"
#include "dpfair/rdp_accountant.h"
#include "dpfair/rng.h"
#include "dpfair/sweep.h"
#include "dpfair/synthetic.h"
#include "dpfair/volatility.h"
#include "gradient_oracle.h"
#include "metrics_oracle.h"
#include "rdp_oracle.h"
#include "volatility_oracle.h"

namespace dpfair {
namespace {

namespace fs = std::filesystem;

// Pinned tolerances and budgets.
constexpr double kClosedFormTol = 1e-9;
constexpr double kRdpOracleTol = 1e-10;
constexpr double kAc1MaxSeconds = 1.0;
constexpr double kCalibrationLowerFraction = 0.995;
constexpr double kAc2MaxSeconds = 5.0;
constexpr double kSensitivitySlack = 1e-9;
constexpr double kGradientRelTol = 1e-5;
constexpr double kGradientAbsFloor = 1e-7;
constexpr double kAc56MaxSeconds = 600.0;
constexpr double kDroPrivacyAllowance = 0.02;
constexpr double kChanceBand = 0.05;
constexpr double kVolatilityTol = 1e-9;

constexpr int kSeeds = 10;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

double Mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / v.size();
}

// Sample standard deviation.
double Stddev(const std::vector<double>& v) {
  const double m = Mean(v);
  double ss = 0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / (v.size() - 1));
}

double PooledStandardError(const std::vector<double>& a, const std::vector<double>& b) {
  return std::sqrt(Stddev(a) * Stddev(a) / a.size() + Stddev(b) * Stddev(b) / b.size());
}

double Norm(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

Outcome Ac1() {
  const auto start = std::chrono::steady_clock::now();
  double worst_closed = 0, worst_oracle = 0;
  for (double sigma : {0.5, 1.0, 2.0, 5.0}) {
    AccountantState state;
    for (int a = kMinRdpOrder; a <= kMaxRdpOrder; ++a) {
      state.rdp_at_order[a] = *RdpOfStep(1.0, sigma, a);
    }
    state.steps_recorded = 1;
    const double want = oracle::EpsilonFromRdp(
        [&](int a) { return oracle::GaussianRdp(sigma, a); }, 1, kDefaultDelta,
        kMinRdpOrder, kMaxRdpOrder);
    worst_closed = std::max(worst_closed,
                            std::abs(*ComposeAndConvert(state, kDefaultDelta) - want));
  }
  for (double q : {0.001, 0.01, 0.1}) {
    for (double sigma : {0.5, 1.0, 2.0, 5.0}) {
      for (int a = kMinRdpOrder; a <= kMaxRdpOrder; ++a) {
        worst_oracle = std::max(worst_oracle, std::abs(*RdpOfStep(q, sigma, a) -
                                                       oracle::SubsampledGaussianRdp(q, sigma, a)));
      }
    }
  }
  const double secs = Seconds(start);
  return {worst_closed <= kClosedFormTol && worst_oracle <= kRdpOracleTol &&
              secs < kAc1MaxSeconds,
          absl::StrFormat("closed-form err %.2e, oracle err %.2e over 756 orders, %.2f s",
                          worst_closed, worst_oracle, secs)};
}

Outcome Ac2() {
  const auto start = std::chrono::steady_clock::now();
  struct Budget {
    double q;
    int64_t steps;
  };
  // The default benchmark (N = 4000, B = 64, 20 epochs) and two others.
  const std::vector<Budget> budgets = {{0.016, 1260}, {0.01, 1000}, {0.1, 200}};
  bool ok = true;
  std::string realized;
  for (const Budget& b : budgets) {
    for (double target : {1.0, 5.0, 10.0}) {
      const absl::StatusOr<double> sigma =
          CalibrateSigma(target, kDefaultDelta, b.q, b.steps);
      if (!sigma.ok()) {
        ok = false;
        continue;
      }
      const double eps = *EpsilonForSteps(b.q, *sigma, b.steps, kDefaultDelta);
      ok = ok && eps <= target && eps >= kCalibrationLowerFraction * target;
      if (b.steps == 1260) absl::StrAppendFormat(&realized, " %.4f", eps);
    }
  }
  const double secs = Seconds(start);
  return {ok && secs < kAc2MaxSeconds,
          absl::StrFormat("realized eps at q=0.016, T=1260:%s; %.2f s", realized, secs)};
}

Outcome Ac3() {
  RngStream rng(3, "acceptance/sensitivity");
  const Model models[] = {Model::LogisticClassifier(5), Model::LinearRegressor(5),
                          Model::Mlp(5, 4, TaskKind::kClassification)};
  double worst_excess = -INFINITY;
  for (int trial = 0; trial < 1000; ++trial) {
    const Model& m = models[trial % 3];
    const double c = 0.1 + 2.0 * rng.Uniform();
    std::vector<Example> pool(1 + rng.NextU64() % 32);
    for (Example& ex : pool) {
      ex.features.resize(5);
      for (double& x : ex.features) x = rng.Normal(0.0, 3.0);
      ex.label = m.task() == TaskKind::kRegression ? rng.Normal(0.0, 5.0)
                                                   : (rng.Bernoulli(0.5) ? 1.0 : 0.0);
    }
    ModelParams p{std::vector<double>(m.num_params())};
    for (double& v : p.values) v = rng.Normal(0.0, 2.0);
    Batch full;
    for (const Example& ex : pool) full.push_back(&ex);
    Batch neighbor = full;
    neighbor.erase(neighbor.begin() + static_cast<long>(rng.NextU64() % full.size()));
    const std::vector<double> a = *ClippedGradientSum(m, p, full, c);
    const std::vector<double> b = *ClippedGradientSum(m, p, neighbor, c);
    std::vector<double> diff(a.size());
    for (size_t j = 0; j < a.size(); ++j) diff[j] = a[j] - b[j];
    worst_excess = std::max(worst_excess, Norm(diff) - c);
  }
  return {worst_excess <= kSensitivitySlack,
          absl::StrFormat("max(||S - S'|| - C) = %.3e over 1000 trials", worst_excess)};
}

Outcome Ac4() {
  RngStream rng(4, "acceptance/gradients");
  const Model models[] = {Model::LinearRegressor(4), Model::LogisticClassifier(4),
                          Model::Mlp(4, 5, TaskKind::kClassification)};
  int bad = 0;
  double worst = 0;
  for (const Model& m : models) {
    for (int probe = 0; probe < 100; ++probe) {
      Example ex;
      ex.features.resize(4);
      for (double& x : ex.features) x = rng.Normal();
      ex.label = m.task() == TaskKind::kRegression ? rng.Normal()
                                                   : (rng.Bernoulli(0.5) ? 1.0 : 0.0);
      ModelParams p{std::vector<double>(m.num_params())};
      for (double& v : p.values) v = rng.Normal(0.0, 0.7);
      const std::vector<double> analytic = *m.Gradient(p, ex);
      const std::vector<double> numeric = oracle::NumericalGradient(m, p, ex);
      bool ok = true;
      for (size_t j = 0; j < analytic.size(); ++j) {
        ok = ok && oracle::RelativelyClose(analytic[j], numeric[j], kGradientRelTol,
                                           kGradientAbsFloor);
        const double scale = std::max(std::abs(analytic[j]), std::abs(numeric[j]));
        if (scale > kGradientAbsFloor) {
          worst = std::max(worst, std::abs(analytic[j] - numeric[j]) / scale);
        }
      }
      bad += !ok;
    }
  }
  return {bad == 0, absl::StrFormat("%d of 300 probes outside tolerance; max rel err %.2e",
                                    bad, worst)};
}

struct DisparityByCell {
  std::vector<double> erm_plain, erm_private, dro_plain, dro_private;
  double seconds = 0;
  std::string error;
};

// The default spurious-correlation benchmark under ERM and Group DRO, without
// DP and at epsilon 1, over 10 seeds.
DisparityByCell RunDisparitySweep() {
  DisparityByCell out;
  const auto start = std::chrono::steady_clock::now();
  ExperimentConfig config;
  config.name = "acceptance_disparity";
  config.training.epochs = 20;
  config.training.learning_rate = 0.1;
  config.training.batch_size = 64;
  config.training.dro_step_size = 0.001;
  config.privacy_levels = {{"No DP", std::nullopt, std::nullopt},
                           {"eps=1", 1.0, std::nullopt}};
  for (int s = 0; s < kSeeds; ++s) config.seeds.push_back(s);
  SweepOptions options;
  options.persist = false;
  const absl::StatusOr<SweepResult> result = RunSweep(config, options);
  out.seconds = Seconds(start);
  if (!result.ok()) {
    out.error = std::string(result.status().message());
    return out;
  }
  for (const RunReport& r : result->reports) {
    if (!r.ok()) {
      out.error = r.error;
      continue;
    }
    const bool dro = r.objective == "group_dro";
    const bool priv = r.target_epsilon.has_value();
    (dro ? (priv ? out.dro_private : out.dro_plain)
         : (priv ? out.erm_private : out.erm_plain))
        .push_back(r.disparity);
  }
  return out;
}

bool Complete(const DisparityByCell& d) {
  return d.error.empty() && d.erm_plain.size() == kSeeds && d.erm_private.size() == kSeeds &&
         d.dro_plain.size() == kSeeds && d.dro_private.size() == kSeeds;
}

Outcome Ac5(const DisparityByCell& d) {
  if (!Complete(d)) return {false, "sweep incomplete: " + d.error};
  const double gap = Mean(d.erm_private) - Mean(d.erm_plain);
  const double se = PooledStandardError(d.erm_private, d.erm_plain);
  return {gap > se && d.seconds < kAc56MaxSeconds,
          absl::StrFormat("ERM GD %.3f (no DP) -> %.3f (eps=1); gap %.3f vs pooled SE %.3f; "
                          "%.1f s",
                          Mean(d.erm_plain), Mean(d.erm_private), gap, se, d.seconds)};
}

Outcome Ac6(const DisparityByCell& d) {
  if (!Complete(d)) return {false, "sweep incomplete: " + d.error};
  const bool first = Mean(d.dro_plain) < Mean(d.erm_plain);
  const bool second = Mean(d.dro_private) <= Mean(d.dro_plain) + kDroPrivacyAllowance;
  return {first && second && d.seconds < kAc56MaxSeconds,
          absl::StrFormat("DRO GD %.3f (no DP) vs ERM %.3f; DRO GD at eps=1 %.3f "
                          "(limit %.3f)",
                          Mean(d.dro_plain), Mean(d.erm_plain), Mean(d.dro_private),
                          Mean(d.dro_plain) + kDroPrivacyAllowance)};
}

Outcome Ac7() {
  std::vector<double> acc;
  for (int seed = 0; seed < kSeeds; ++seed) {
    SyntheticSpec spec;
    spec.group_sizes = {500, 500, 500, 500};
    spec.seed = 2 * seed;
    SyntheticSpec test_spec = spec;
    test_spec.seed = 2 * seed + 1;
    const Dataset train = *GenerateSynthetic(spec);
    const Dataset test = *GenerateSynthetic(test_spec);
    const Model m = Model::LogisticClassifier(train.feature_dim());
    TrainConfig c;
    c.epochs = 1;
    c.learning_rate = 0.1;
    c.batch_size = 64;
    c.seed = seed;
    PrivacySpec p;
    p.noise_multiplier = 100.0;
    p.clipping_bound = kClassificationClippingBound;
    c.privacy = p;
    const absl::StatusOr<TrainResult> r = Train(m, train, c);
    if (!r.ok()) return {false, std::string(r.status().message())};
    acc.push_back(*EvaluateOverall(m, r->params, test, MetricKind::kAccuracy));
  }
  const double mean = Mean(acc);
  double lo = 1, hi = 0;
  for (double a : acc) {
    lo = std::min(lo, a);
    hi = std::max(hi, a);
  }
  return {std::abs(mean - 0.5) <= kChanceBand,
          absl::StrFormat("mean accuracy %.3f (seeds %.3f..%.3f), chance 0.500", mean, lo,
                          hi)};
}

Outcome Ac8() {
  std::vector<double> plain, priv;
  const Dataset train = *GenerateSynthetic(DefaultSpuriousTrainSpec());
  const Model m = Model::LogisticClassifier(train.feature_dim());
  for (int seed = 0; seed < kSeeds; ++seed) {
    TrainConfig c;
    c.epochs = 20;
    c.learning_rate = 0.1;
    c.batch_size = 64;
    c.seed = seed;
    const absl::StatusOr<TrainResult> a = Train(m, train, c);
    PrivacySpec p;
    p.noise_multiplier = 1.0;
    p.clipping_bound = kClassificationClippingBound;
    c.privacy = p;
    const absl::StatusOr<TrainResult> b = Train(m, train, c);
    if (!a.ok() || !b.ok()) return {false, "training failed"};
    plain.push_back(Norm(a->params.values));
    priv.push_back(Norm(b->params.values));
  }
  const double gap = Mean(plain) - Mean(priv);
  const double se = PooledStandardError(plain, priv);
  return {gap > se, absl::StrFormat("||theta|| %.3f (SGD) vs %.3f (DP-SGD); gap %.3f vs "
                                    "pooled SE %.3f",
                                    Mean(plain), Mean(priv), gap, se)};
}

Outcome Ac9() {
  RngStream rng(9, "acceptance/volatility");
  double worst = 0;
  bool scale_exact = true;
  for (int trial = 0; trial < 100; ++trial) {
    const size_t n = 5 + rng.NextU64() % 80;
    std::vector<double> p = {20.0 + 200.0 * rng.Uniform()};
    const double vol = 0.001 + 0.05 * rng.Uniform();
    while (p.size() < n) p.push_back(p.back() * (1.0 + rng.Normal(0.0, vol)));
    const int tau = 1 + static_cast<int>(rng.NextU64() % (n - 2));
    const size_t t = tau + 1 + rng.NextU64() % (n - tau - 1);
    const double v = *LogVolatility(p, t, tau);
    worst = std::max(worst, std::abs(v - oracle::LogVolatility(p, t, tau)));
    for (double c : {0.125, 2.0, 64.0}) {
      std::vector<double> q = p;
      for (double& x : q) x *= c;
      scale_exact = scale_exact && *LogVolatility(q, t, tau) == v;
    }
  }
  return {worst <= kVolatilityTol && scale_exact,
          absl::StrFormat("max |v - oracle| %.2e over 100 series; scaling by powers of two "
                          "%s",
                          worst, scale_exact ? "exact" : "NOT exact")};
}

Outcome Ac10() {
  RngStream rng(10, "acceptance/metrics");
  int mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const size_t n = 1 + rng.NextU64() % 30;
    std::vector<double> pred(n), label(n), yhat(n), y(n);
    for (size_t i = 0; i < n; ++i) {
      pred[i] = rng.Bernoulli(0.5);
      label[i] = rng.Bernoulli(0.5);
      yhat[i] = static_cast<double>(rng.NextU64() % 49) / 8.0 - 3.0;
      y[i] = static_cast<double>(rng.NextU64() % 49) / 8.0 - 3.0;
    }
    mismatches += *Accuracy(pred, label) != oracle::Accuracy(pred, label);
    mismatches += *F1Binary(pred, label) != oracle::F1(pred, label);
    mismatches += *MeanSquaredError(yhat, y) != oracle::MeanSquaredError(yhat, y);
    GroupScores s;
    s.higher_is_better = rng.Bernoulli(0.5);
    for (size_t g = 0, k = 1 + rng.NextU64() % 6; g < k; ++g) {
      s.per_group.push_back(static_cast<double>(rng.NextU64() % 5) / 4.0);
    }
    const DisparityReport got = *GroupDisparity(s);
    const oracle::Disparity want = oracle::GroupDisparity(s.per_group, s.higher_is_better);
    mismatches += got.delta != want.delta || got.best_group != want.best ||
                  got.worst_group != want.worst;
  }
  const CsvSchema schema{{"x"}, "group", "blond", TaskKind::kClassification};
  const absl::StatusOr<LoadedDataset> loaded =
      LoadCsvDataset(std::string(DPFAIR_FIXTURE_DIR) + "/celeba_groups.csv", schema);
  if (!loaded.ok()) return {false, std::string(loaded.status().message())};
  const std::vector<size_t> counts = ComputeGroupDistribution(loaded->dataset).counts;
  const bool counts_ok = counts == std::vector<size_t>{66874, 1387, 71629, 22880};
  std::string shown;
  for (size_t c : counts) absl::StrAppend(&shown, shown.empty() ? "" : ", ", c);
  return {mismatches == 0 && counts_ok,
          absl::StrFormat("%d mismatches over 1000 instances; fixture counts (%s)",
                          mismatches, shown)};
}

std::map<std::string, std::string> ReadArtifacts(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file() || e.path().filename() == "timings.json") continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    files[fs::relative(e.path(), root).string()] = ss.str();
  }
  return files;
}

Outcome Ac11() {
  const absl::StatusOr<ExperimentConfig> config =
      LoadExperimentConfig(std::string(DPFAIR_CONFIG_DIR) + "/volatility.yaml");
  if (!config.ok()) return {false, std::string(config.status().message())};
  const fs::path base = fs::temp_directory_path() / "dpfair_acceptance_determinism";
  fs::remove_all(base);
  std::vector<std::map<std::string, std::string>> trees;
  for (int jobs : {1, 2}) {
    SweepOptions options;
    options.output_dir = (base / absl::StrFormat("run%d", jobs)).string();
    options.jobs = jobs;
    const absl::StatusOr<SweepResult> r = RunSweep(*config, options);
    if (!r.ok()) return {false, std::string(r.status().message())};
    trees.push_back(ReadArtifacts(options.output_dir));
  }
  fs::remove_all(base);
  size_t differing = 0;
  for (const auto& [name, bytes] : trees[0]) {
    auto it = trees[1].find(name);
    differing += it == trees[1].end() || it->second != bytes;
  }
  differing += trees[1].size() - std::min(trees[1].size(), trees[0].size());
  return {differing == 0 && !trees[0].empty(),
          absl::StrFormat("%d artifacts compared, %d differ", trees[0].size(), differing)};
}

}  // namespace
}  // namespace dpfair

int main() {
  using dpfair::Outcome;
  int failures = 0;
  auto report = [&](const char* id, const char* title, const std::function<Outcome()>& fn) {
    const auto start = std::chrono::steady_clock::now();
    const Outcome o = fn();
    const double secs = dpfair::Seconds(start);
    std::printf("%s %s %s: %s [%.2f s]\n", id, o.pass ? "PASS" : "FAIL", title,
                o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += !o.pass;
  };
  report("AC1", "accountant correctness", dpfair::Ac1);
  report("AC2", "calibration round-trip", dpfair::Ac2);
  report("AC3", "clipped-sum sensitivity", dpfair::Ac3);
  report("AC4", "gradient oracle", dpfair::Ac4);
  std::printf("running the 10-seed disparity sweep for AC5 and AC6...\n");
  std::fflush(stdout);
  const dpfair::DisparityByCell sweep = dpfair::RunDisparitySweep();
  report("AC5", "ERM disparity grows under DP", [&] { return dpfair::Ac5(sweep); });
  report("AC6", "Group DRO mitigation", [&] { return dpfair::Ac6(sweep); });
  report("AC7", "sigma = 100 gives chance accuracy", dpfair::Ac7);
  report("AC8", "noise shrinks the weight norm", dpfair::Ac8);
  report("AC9", "volatility oracle", dpfair::Ac9);
  report("AC10", "metrics oracle and group counts", dpfair::Ac10);
  report("AC11", "byte-identical reruns", dpfair::Ac11);
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

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

#include "dpfair/experiment_config.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "dpfair/rng.h"
#include "json.hpp"
#include "yaml-cpp/yaml.h"

namespace dpfair {
namespace {

using Json = nlohmann::json;

// Reads typed values out of a YAML tree and reports failures with the
// location of the offending node.
class YamlReader {
 public:
  explicit YamlReader(std::string source) : source_(std::move(source)) {}

  absl::Status Error(const YAML::Node& node, const std::string& message) const {
    const YAML::Mark mark = node.Mark();
    if (mark.line < 0) {
      return absl::InvalidArgumentError(absl::StrCat(source_, ": ", message));
    }
    return absl::InvalidArgumentError(absl::StrCat(
        source_, ":", mark.line + 1, ":", mark.column + 1, ": ", message));
  }

  absl::Status ExpectMap(const YAML::Node& node, const std::string& what) const {
    if (!node.IsMap()) return Error(node, absl::StrCat(what, " must be a mapping"));
    return absl::OkStatus();
  }

  // Rejects keys outside `allowed`.
  absl::Status CheckKeys(const YAML::Node& node, const std::string& what,
                         std::initializer_list<const char*> allowed) const {
    for (const auto& kv : node) {
      const std::string key = kv.first.Scalar();
      bool ok = false;
      for (const char* a : allowed) ok = ok || key == a;
      if (!ok) {
        std::vector<std::string> names(allowed.begin(), allowed.end());
        return Error(kv.first,
                     absl::StrCat("unknown key '", key, "' in ", what,
                                  " (expected one of: ",
                                  absl::StrJoin(names, ", "), ")"));
      }
    }
    return absl::OkStatus();
  }

  template <typename T>
  absl::StatusOr<T> As(const YAML::Node& node, const std::string& what) const {
    if (!node.IsScalar()) {
      return Error(node, absl::StrCat(what, " must be a scalar"));
    }
    try {
      return node.as<T>();
    } catch (const YAML::Exception&) {
      return Error(node, absl::StrCat(what, " has an invalid value '",
                                      node.Scalar(), "'"));
    }
  }

  absl::StatusOr<double> Double(const YAML::Node& node,
                                const std::string& what) const {
    absl::StatusOr<double> v = As<double>(node, what);
    if (v.ok() && !std::isfinite(*v)) {
      return Error(node, absl::StrCat(what, " must be finite"));
    }
    return v;
  }

  absl::StatusOr<long long> Integer(const YAML::Node& node,
                                    const std::string& what,
                                    long long min_value) const {
    absl::StatusOr<long long> v = As<long long>(node, what);
    if (v.ok() && *v < min_value) {
      return Error(node, absl::StrCat(what, " must be >= ", min_value));
    }
    return v;
  }

  absl::StatusOr<std::vector<YAML::Node>> Sequence(
      const YAML::Node& node, const std::string& what) const {
    if (!node.IsSequence()) {
      return Error(node, absl::StrCat(what, " must be a list"));
    }
    std::vector<YAML::Node> items;
    for (const auto& item : node) items.push_back(item);
    return items;
  }

 private:
  std::string source_;
};

#define DPFAIR_ASSIGN(lhs, expr)            \
  do {                                      \
    auto _v = (expr);                       \
    if (!_v.ok()) return _v.status();       \
    lhs = *std::move(_v);                   \
  } while (0)

#define DPFAIR_RETURN_IF_ERROR(expr)        \
  do {                                      \
    absl::Status _s = (expr);               \
    if (!_s.ok()) return _s;                \
  } while (0)

absl::Status ParseSyntheticSpec(const YamlReader& r, const YAML::Node& node,
                                const std::string& what, SyntheticSpec* spec) {
  DPFAIR_RETURN_IF_ERROR(r.ExpectMap(node, what));
  DPFAIR_RETURN_IF_ERROR(r.CheckKeys(
      node, what,
      {"group_sizes", "core_mean", "spurious_mean", "noise_std",
       "spurious_agreement", "extra_noise_dims", "seed"}));
  if (node["group_sizes"]) {
    std::vector<YAML::Node> items;
    DPFAIR_ASSIGN(items, r.Sequence(node["group_sizes"], what + ".group_sizes"));
    if (items.size() != spec->group_sizes.size()) {
      return r.Error(node["group_sizes"],
                     absl::StrCat(what, ".group_sizes must list exactly ",
                                  spec->group_sizes.size(), " counts"));
    }
    for (size_t i = 0; i < items.size(); ++i) {
      DPFAIR_ASSIGN(spec->group_sizes[i],
                    r.Integer(items[i], what + ".group_sizes", 1));
    }
  }
  if (node["core_mean"]) {
    DPFAIR_ASSIGN(spec->core_mean, r.Double(node["core_mean"], what + ".core_mean"));
  }
  if (node["spurious_mean"]) {
    DPFAIR_ASSIGN(spec->spurious_mean,
                  r.Double(node["spurious_mean"], what + ".spurious_mean"));
  }
  if (node["noise_std"]) {
    DPFAIR_ASSIGN(spec->noise_std, r.Double(node["noise_std"], what + ".noise_std"));
  }
  if (node["spurious_agreement"]) {
    DPFAIR_ASSIGN(spec->spurious_agreement,
                  r.Double(node["spurious_agreement"], what + ".spurious_agreement"));
  }
  if (node["extra_noise_dims"]) {
    DPFAIR_ASSIGN(spec->extra_noise_dims,
                  r.Integer(node["extra_noise_dims"], what + ".extra_noise_dims", 0));
  }
  if (node["seed"]) {
    DPFAIR_ASSIGN(spec->seed, r.Integer(node["seed"], what + ".seed", 0));
  }
  if (absl::Status s = spec->Validate(); !s.ok()) {
    return r.Error(node, absl::StrCat(what, ": ", s.message()));
  }
  return absl::OkStatus();
}

template <typename T>
absl::Status ParseList(const YamlReader& r, const YAML::Node& node,
                       const std::string& what, std::vector<T>* out,
                       const std::function<absl::StatusOr<T>(const YAML::Node&)>& item) {
  std::vector<YAML::Node> items;
  DPFAIR_ASSIGN(items, r.Sequence(node, what));
  out->clear();
  for (const YAML::Node& n : items) {
    T v;
    DPFAIR_ASSIGN(v, item(n));
    out->push_back(std::move(v));
  }
  return absl::OkStatus();
}

absl::Status ParsePriceSimulation(const YamlReader& r, const YAML::Node& node,
                                  PriceSimulationSpec* spec) {
  const std::string what = "dataset.simulation";
  DPFAIR_RETURN_IF_ERROR(r.ExpectMap(node, what));
  DPFAIR_RETURN_IF_ERROR(r.CheckKeys(
      node, what,
      {"group_names", "series_per_group", "base_log_volatility",
       "volatility_of_volatility", "persistence", "days", "seed"}));
  if (node["group_names"]) {
    DPFAIR_RETURN_IF_ERROR(ParseList<std::string>(
        r, node["group_names"], what + ".group_names", &spec->group_names,
        [&](const YAML::Node& n) { return r.As<std::string>(n, what + ".group_names"); }));
  }
  if (node["series_per_group"]) {
    DPFAIR_RETURN_IF_ERROR(ParseList<size_t>(
        r, node["series_per_group"], what + ".series_per_group",
        &spec->series_per_group, [&](const YAML::Node& n) -> absl::StatusOr<size_t> {
          absl::StatusOr<long long> v = r.Integer(n, what + ".series_per_group", 1);
          if (!v.ok()) return v.status();
          return static_cast<size_t>(*v);
        }));
  }
  for (auto [key, field] :
       {std::pair{"base_log_volatility", &spec->base_log_volatility},
        std::pair{"volatility_of_volatility", &spec->volatility_of_volatility}}) {
    if (!node[key]) continue;
    const std::string name = absl::StrCat(what, ".", key);
    DPFAIR_RETURN_IF_ERROR(ParseList<double>(
        r, node[key], name, field,
        [&](const YAML::Node& n) { return r.Double(n, name); }));
  }
  if (node["persistence"]) {
    DPFAIR_ASSIGN(spec->persistence,
                  r.Double(node["persistence"], what + ".persistence"));
  }
  if (node["days"]) {
    DPFAIR_ASSIGN(spec->days, r.Integer(node["days"], what + ".days", 3));
  }
  if (node["seed"]) {
    DPFAIR_ASSIGN(spec->seed, r.Integer(node["seed"], what + ".seed", 0));
  }
  if (absl::Status s = spec->Validate(); !s.ok()) {
    return r.Error(node, absl::StrCat(what, ": ", s.message()));
  }
  return absl::OkStatus();
}

std::string ResolvePath(const std::string& base_dir, const std::string& path) {
  if (base_dir.empty() || path.empty()) return path;
  std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(base_dir) / p).lexically_normal().string();
}

absl::Status ParseDataset(const YamlReader& r, const YAML::Node& node,
                          const std::string& base_dir, DataSource* data) {
  DPFAIR_RETURN_IF_ERROR(r.ExpectMap(node, "dataset"));
  std::string kind = "synthetic";
  if (node["kind"]) DPFAIR_ASSIGN(kind, r.As<std::string>(node["kind"], "dataset.kind"));
  const YAML::Node where = node["kind"] ? node["kind"] : node;

  if (kind == "synthetic") {
    data->kind = DataSourceKind::kSynthetic;
    DPFAIR_RETURN_IF_ERROR(r.CheckKeys(node, "dataset", {"kind", "train", "test"}));
    data->synthetic_train = DefaultSpuriousTrainSpec();
    if (node["train"]) {
      DPFAIR_RETURN_IF_ERROR(ParseSyntheticSpec(r, node["train"], "dataset.train",
                                                &data->synthetic_train));
    }
    // The test split shares the training feature model unless overridden.
    SyntheticSpec test = data->synthetic_train;
    test.group_sizes = DefaultSpuriousTestSpec().group_sizes;
    test.seed = DefaultSpuriousTestSpec().seed;
    if (node["test"]) {
      DPFAIR_RETURN_IF_ERROR(
          ParseSyntheticSpec(r, node["test"], "dataset.test", &test));
    }
    data->synthetic_test = test;
    return absl::OkStatus();
  }
  if (kind == "csv") {
    data->kind = DataSourceKind::kCsv;
    DPFAIR_RETURN_IF_ERROR(r.CheckKeys(
        node, "dataset",
        {"kind", "train_path", "test_path", "feature_columns", "group_column",
         "label_column", "task"}));
    for (const char* key : {"train_path", "test_path", "feature_columns",
                            "group_column", "label_column"}) {
      if (!node[key]) {
        return r.Error(node, absl::StrCat("dataset.", key,
                                          " is required for csv datasets"));
      }
    }
    std::string train, test;
    DPFAIR_ASSIGN(train, r.As<std::string>(node["train_path"], "dataset.train_path"));
    DPFAIR_ASSIGN(test, r.As<std::string>(node["test_path"], "dataset.test_path"));
    data->train_path = ResolvePath(base_dir, train);
    data->test_path = ResolvePath(base_dir, test);
    DPFAIR_RETURN_IF_ERROR(ParseList<std::string>(
        r, node["feature_columns"], "dataset.feature_columns",
        &data->schema.feature_columns, [&](const YAML::Node& n) {
          return r.As<std::string>(n, "dataset.feature_columns");
        }));
    if (data->schema.feature_columns.empty()) {
      return r.Error(node["feature_columns"],
                     "dataset.feature_columns must not be empty");
    }
    DPFAIR_ASSIGN(data->schema.group_column,
                  r.As<std::string>(node["group_column"], "dataset.group_column"));
    DPFAIR_ASSIGN(data->schema.label_column,
                  r.As<std::string>(node["label_column"], "dataset.label_column"));
    data->schema.task = TaskKind::kClassification;
    if (node["task"]) {
      std::string task;
      DPFAIR_ASSIGN(task, r.As<std::string>(node["task"], "dataset.task"));
      if (task == "classification") {
        data->schema.task = TaskKind::kClassification;
      } else if (task == "regression") {
        data->schema.task = TaskKind::kRegression;
      } else {
        return r.Error(node["task"],
                       absl::StrCat("dataset.task must be 'classification' or "
                                    "'regression', got '", task, "'"));
      }
    }
    return absl::OkStatus();
  }
  if (kind == "price_series" || kind == "synthetic_prices") {
    const bool simulated = kind == "synthetic_prices";
    data->kind = simulated ? DataSourceKind::kSyntheticPrices
                           : DataSourceKind::kPriceSeries;
    if (simulated) {
      DPFAIR_RETURN_IF_ERROR(
          r.CheckKeys(node, "dataset", {"kind", "simulation", "volatility"}));
      if (node["simulation"]) {
        DPFAIR_RETURN_IF_ERROR(
            ParsePriceSimulation(r, node["simulation"], &data->price_simulation));
      }
    } else {
      DPFAIR_RETURN_IF_ERROR(
          r.CheckKeys(node, "dataset", {"kind", "path", "volatility"}));
      if (!node["path"]) {
        return r.Error(node, "dataset.path is required for price_series datasets");
      }
      std::string path;
      DPFAIR_ASSIGN(path, r.As<std::string>(node["path"], "dataset.path"));
      data->prices_path = ResolvePath(base_dir, path);
    }
    if (node["volatility"]) {
      const YAML::Node v = node["volatility"];
      DPFAIR_RETURN_IF_ERROR(r.ExpectMap(v, "dataset.volatility"));
      DPFAIR_RETURN_IF_ERROR(r.CheckKeys(
          v, "dataset.volatility", {"lookback", "event_stride", "train_fraction"}));
      if (v["lookback"]) {
        DPFAIR_ASSIGN(data->volatility.lookback,
                      r.Integer(v["lookback"], "dataset.volatility.lookback", 5));
      }
      if (v["event_stride"]) {
        DPFAIR_ASSIGN(data->volatility.event_stride,
                      r.Integer(v["event_stride"], "dataset.volatility.event_stride", 1));
      }
      if (v["train_fraction"]) {
        DPFAIR_ASSIGN(data->volatility.train_fraction,
                      r.Double(v["train_fraction"], "dataset.volatility.train_fraction"));
      }
      if (absl::Status s = data->volatility.Validate(); !s.ok()) {
        return r.Error(v, absl::StrCat("dataset.volatility: ", s.message()));
      }
    }
    return absl::OkStatus();
  }
  return r.Error(where, absl::StrCat("dataset.kind must be one of synthetic, "
                                     "csv, price_series, synthetic_prices; got '",
                                     kind, "'"));
}

absl::Status ParsePrivacy(const YamlReader& r, const YAML::Node& node,
                          ExperimentConfig* config) {
  DPFAIR_RETURN_IF_ERROR(r.ExpectMap(node, "privacy"));
  DPFAIR_RETURN_IF_ERROR(
      r.CheckKeys(node, "privacy", {"delta", "clipping_bound", "levels"}));
  if (node["delta"]) {
    DPFAIR_ASSIGN(config->delta, r.Double(node["delta"], "privacy.delta"));
    if (!(config->delta > 0.0 && config->delta < 1.0)) {
      return r.Error(node["delta"], "privacy.delta must lie in (0, 1)");
    }
  }
  if (node["clipping_bound"]) {
    double c;
    DPFAIR_ASSIGN(c, r.Double(node["clipping_bound"], "privacy.clipping_bound"));
    if (!(c > 0.0)) {
      return r.Error(node["clipping_bound"], "privacy.clipping_bound must be > 0");
    }
    config->clipping_bound = c;
  }
  if (!node["levels"]) return absl::OkStatus();
  std::vector<YAML::Node> items;
  DPFAIR_ASSIGN(items, r.Sequence(node["levels"], "privacy.levels"));
  if (items.empty()) return r.Error(node["levels"], "privacy.levels must not be empty");
  config->privacy_levels.clear();
  std::set<std::string> labels, sanitized;
  for (const YAML::Node& item : items) {
    DPFAIR_RETURN_IF_ERROR(r.ExpectMap(item, "privacy level"));
    DPFAIR_RETURN_IF_ERROR(r.CheckKeys(
        item, "privacy level", {"label", "target_epsilon", "noise_multiplier"}));
    if (!item["label"]) return r.Error(item, "privacy level needs a label");
    PrivacyLevel level;
    DPFAIR_ASSIGN(level.label, r.As<std::string>(item["label"], "privacy level label"));
    if (level.label.empty()) return r.Error(item["label"], "privacy label is empty");
    if (!labels.insert(level.label).second) {
      return r.Error(item["label"],
                     absl::StrCat("duplicate privacy label '", level.label, "'"));
    }
    if (!sanitized.insert(SanitizeLabel(level.label)).second) {
      return r.Error(item["label"],
                     absl::StrCat("privacy label '", level.label,
                                  "' collides with another label once made "
                                  "file-name safe"));
    }
    if (item["target_epsilon"] && item["noise_multiplier"]) {
      return r.Error(item, "set at most one of target_epsilon and noise_multiplier");
    }
    if (item["target_epsilon"]) {
      double eps;
      DPFAIR_ASSIGN(eps, r.Double(item["target_epsilon"], "target_epsilon"));
      if (!(eps > 0.0)) return r.Error(item["target_epsilon"], "target_epsilon must be > 0");
      level.target_epsilon = eps;
    }
    if (item["noise_multiplier"]) {
      double sigma;
      DPFAIR_ASSIGN(sigma, r.Double(item["noise_multiplier"], "noise_multiplier"));
      if (!(sigma > 0.0)) {
        return r.Error(item["noise_multiplier"], "noise_multiplier must be > 0");
      }
      level.noise_multiplier = sigma;
    }
    config->privacy_levels.push_back(std::move(level));
  }
  return absl::OkStatus();
}

absl::Status ParseTraining(const YamlReader& r, const YAML::Node& node,
                           TrainConfig* t) {
  DPFAIR_RETURN_IF_ERROR(r.ExpectMap(node, "training"));
  DPFAIR_RETURN_IF_ERROR(r.CheckKeys(
      node, "training", {"epochs", "learning_rate", "batch_size", "dro_step_size"}));
  if (node["epochs"]) DPFAIR_ASSIGN(t->epochs, r.Integer(node["epochs"], "training.epochs", 1));
  if (node["batch_size"]) {
    DPFAIR_ASSIGN(t->batch_size, r.Integer(node["batch_size"], "training.batch_size", 1));
  }
  if (node["learning_rate"]) {
    DPFAIR_ASSIGN(t->learning_rate,
                  r.Double(node["learning_rate"], "training.learning_rate"));
    if (!(t->learning_rate > 0.0)) {
      return r.Error(node["learning_rate"], "training.learning_rate must be > 0");
    }
  }
  if (node["dro_step_size"]) {
    DPFAIR_ASSIGN(t->dro_step_size,
                  r.Double(node["dro_step_size"], "training.dro_step_size"));
    if (!(t->dro_step_size >= 0.0)) {
      return r.Error(node["dro_step_size"], "training.dro_step_size must be >= 0");
    }
  }
  return absl::OkStatus();
}

std::vector<PrivacyLevel> DefaultPrivacyLevels() {
  return {{"No DP", std::nullopt, std::nullopt},
          {"eps=10", 10.0, std::nullopt},
          {"eps=5", 5.0, std::nullopt},
          {"eps=1", 1.0, std::nullopt}};
}

Json SyntheticJson(const SyntheticSpec& s) {
  return Json{{"group_sizes", s.group_sizes},
              {"core_mean", s.core_mean},
              {"spurious_mean", s.spurious_mean},
              {"noise_std", s.noise_std},
              {"spurious_agreement", s.spurious_agreement},
              {"extra_noise_dims", s.extra_noise_dims},
              {"seed", s.seed}};
}

}  // namespace

std::string DataSourceKindName(DataSourceKind kind) {
  switch (kind) {
    case DataSourceKind::kSynthetic:
      return "synthetic";
    case DataSourceKind::kCsv:
      return "csv";
    case DataSourceKind::kPriceSeries:
      return "price_series";
    case DataSourceKind::kSyntheticPrices:
      return "synthetic_prices";
  }
  return "unknown";
}

TaskKind DataSource::task() const {
  switch (kind) {
    case DataSourceKind::kSynthetic:
      return TaskKind::kClassification;
    case DataSourceKind::kCsv:
      return schema.task;
    case DataSourceKind::kPriceSeries:
    case DataSourceKind::kSyntheticPrices:
      return TaskKind::kRegression;
  }
  return TaskKind::kClassification;
}

bool DataSource::is_price_task() const {
  return kind == DataSourceKind::kPriceSeries ||
         kind == DataSourceKind::kSyntheticPrices;
}

std::string SanitizeLabel(const std::string& label) {
  std::string out = label;
  for (char& c : out) {
    const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                      (c >= '0' && c <= '9') || c == '.' || c == '-';
    if (!keep) c = '_';
  }
  return out;
}

double ExperimentConfig::EffectiveClippingBound() const {
  return clipping_bound.value_or(DefaultClippingBound(data.task()));
}

absl::Status ExperimentConfig::Validate() const {
  if (seeds.empty()) return absl::InvalidArgumentError("at least one seed is required");
  if (objectives.empty()) {
    return absl::InvalidArgumentError("at least one objective is required");
  }
  std::set<Objective> seen_objectives(objectives.begin(), objectives.end());
  if (seen_objectives.size() != objectives.size()) {
    return absl::InvalidArgumentError("objectives must be unique");
  }
  if (privacy_levels.empty()) {
    return absl::InvalidArgumentError("at least one privacy level is required");
  }
  std::set<std::string> labels, sanitized;
  for (const PrivacyLevel& level : privacy_levels) {
    if (level.label.empty()) return absl::InvalidArgumentError("empty privacy label");
    if (!labels.insert(level.label).second ||
        !sanitized.insert(SanitizeLabel(level.label)).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("privacy label '", level.label, "' is not unique"));
    }
    if (level.target_epsilon && level.noise_multiplier) {
      return absl::InvalidArgumentError(absl::StrCat(
          "privacy level '", level.label,
          "' sets both target_epsilon and noise_multiplier"));
    }
  }
  if (training.epochs < 1 || training.batch_size < 1 ||
      !(training.learning_rate > 0.0) || !(training.dro_step_size >= 0.0)) {
    return absl::InvalidArgumentError("invalid training settings");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError("delta must lie in (0, 1)");
  }
  if (clipping_bound && !(*clipping_bound > 0.0)) {
    return absl::InvalidArgumentError("clipping_bound must be > 0");
  }
  if (jobs < 1) return absl::InvalidArgumentError("jobs must be >= 1");

  const TaskKind task = data.task();
  if ((metric == MetricKind::kMse) != (task == TaskKind::kRegression)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "metric '", MetricKindName(metric), "' does not fit a ",
        TaskKindName(task), " task"));
  }
  if (model_family == ModelFamily::kLogisticClassifier &&
      task != TaskKind::kClassification) {
    return absl::InvalidArgumentError("the logistic model needs a classification task");
  }
  if (model_family == ModelFamily::kLinearRegressor &&
      task != TaskKind::kRegression) {
    return absl::InvalidArgumentError("the linear model needs a regression task");
  }
  if (model_family == ModelFamily::kMlp && hidden_size < 1) {
    return absl::InvalidArgumentError("the mlp needs hidden_size >= 1");
  }
  if (data.is_price_task()) {
    if (taus.empty()) {
      return absl::InvalidArgumentError("price-series tasks need at least one tau");
    }
    std::set<int> unique_taus;
    for (int tau : taus) {
      if (tau < 1) return absl::InvalidArgumentError("tau must be >= 1");
      if (!unique_taus.insert(tau).second) {
        return absl::InvalidArgumentError(absl::StrCat("duplicate tau ", tau));
      }
    }
  } else if (!taus.empty()) {
    return absl::InvalidArgumentError("taus apply to price-series tasks only");
  }
  switch (data.kind) {
    case DataSourceKind::kSynthetic:
      if (absl::Status s = data.synthetic_train.Validate(); !s.ok()) return s;
      return data.synthetic_test.Validate();
    case DataSourceKind::kCsv:
      if (data.train_path.empty() || data.test_path.empty() ||
          data.schema.feature_columns.empty()) {
        return absl::InvalidArgumentError("incomplete csv dataset settings");
      }
      return absl::OkStatus();
    case DataSourceKind::kPriceSeries:
      if (data.prices_path.empty()) {
        return absl::InvalidArgumentError("price_series needs a path");
      }
      return data.volatility.Validate();
    case DataSourceKind::kSyntheticPrices:
      if (absl::Status s = data.price_simulation.Validate(); !s.ok()) return s;
      return data.volatility.Validate();
  }
  return absl::OkStatus();
}

absl::StatusOr<ExperimentConfig> ParseExperimentConfig(
    const std::string& yaml_text, const std::string& source_name,
    const std::string& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::ParserException& e) {
    return absl::InvalidArgumentError(
        absl::StrCat(source_name, ":", e.mark.line + 1, ":", e.mark.column + 1,
                     ": ", e.msg));
  }
  YamlReader r(source_name);
  if (!root.IsMap()) {
    return absl::InvalidArgumentError(
        absl::StrCat(source_name, ": the config must be a mapping"));
  }
  DPFAIR_RETURN_IF_ERROR(r.CheckKeys(
      root, "config",
      {"name", "dataset", "model", "training", "objectives", "privacy", "seeds",
       "metric", "taus", "output_dir", "jobs"}));

  ExperimentConfig config;
  if (root["name"]) DPFAIR_ASSIGN(config.name, r.As<std::string>(root["name"], "name"));
  if (root["dataset"]) {
    DPFAIR_RETURN_IF_ERROR(ParseDataset(r, root["dataset"], base_dir, &config.data));
  }
  const TaskKind task = config.data.task();

  config.model_family = task == TaskKind::kClassification
                            ? ModelFamily::kLogisticClassifier
                            : ModelFamily::kLinearRegressor;
  if (root["model"]) {
    const YAML::Node m = root["model"];
    DPFAIR_RETURN_IF_ERROR(r.ExpectMap(m, "model"));
    DPFAIR_RETURN_IF_ERROR(r.CheckKeys(m, "model", {"family", "hidden_size"}));
    if (m["family"]) {
      std::string family;
      DPFAIR_ASSIGN(family, r.As<std::string>(m["family"], "model.family"));
      absl::StatusOr<ModelFamily> parsed = ParseModelFamily(family);
      if (!parsed.ok()) return r.Error(m["family"], std::string(parsed.status().message()));
      config.model_family = *parsed;
    }
    if (m["hidden_size"]) {
      DPFAIR_ASSIGN(config.hidden_size, r.Integer(m["hidden_size"], "model.hidden_size", 1));
    }
  }
  if (config.data.kind == DataSourceKind::kSynthetic) {
    config.training.epochs = 20;
  }
  if (root["training"]) {
    DPFAIR_RETURN_IF_ERROR(ParseTraining(r, root["training"], &config.training));
  }
  if (root["objectives"]) {
    DPFAIR_RETURN_IF_ERROR(ParseList<Objective>(
        r, root["objectives"], "objectives", &config.objectives,
        [&](const YAML::Node& n) -> absl::StatusOr<Objective> {
          absl::StatusOr<std::string> name = r.As<std::string>(n, "objective");
          if (!name.ok()) return name.status();
          absl::StatusOr<Objective> o = ParseObjective(*name);
          if (!o.ok()) return r.Error(n, std::string(o.status().message()));
          return o;
        }));
    std::set<Objective> seen;
    for (size_t i = 0; i < config.objectives.size(); ++i) {
      if (!seen.insert(config.objectives[i]).second) {
        return r.Error(root["objectives"][i], "duplicate objective");
      }
    }
    if (config.objectives.empty()) {
      return r.Error(root["objectives"], "objectives must not be empty");
    }
  }
  config.privacy_levels = DefaultPrivacyLevels();
  if (root["privacy"]) DPFAIR_RETURN_IF_ERROR(ParsePrivacy(r, root["privacy"], &config));

  if (root["seeds"]) {
    DPFAIR_RETURN_IF_ERROR(ParseList<uint64_t>(
        r, root["seeds"], "seeds", &config.seeds,
        [&](const YAML::Node& n) -> absl::StatusOr<uint64_t> {
          absl::StatusOr<long long> v = r.Integer(n, "seed", 0);
          if (!v.ok()) return v.status();
          return static_cast<uint64_t>(*v);
        }));
    if (config.seeds.empty()) return r.Error(root["seeds"], "seeds must not be empty");
  } else {
    const int n = task == TaskKind::kClassification ? 3 : 5;
    for (int i = 0; i < n; ++i) config.seeds.push_back(i);
  }

  config.metric =
      task == TaskKind::kClassification ? MetricKind::kAccuracy : MetricKind::kMse;
  if (root["metric"]) {
    std::string name;
    DPFAIR_ASSIGN(name, r.As<std::string>(root["metric"], "metric"));
    absl::StatusOr<MetricKind> kind = ParseMetricKind(name);
    if (!kind.ok()) return r.Error(root["metric"], std::string(kind.status().message()));
    config.metric = *kind;
  }
  if (root["taus"]) {
    DPFAIR_RETURN_IF_ERROR(ParseList<int>(
        r, root["taus"], "taus", &config.taus,
        [&](const YAML::Node& n) -> absl::StatusOr<int> {
          absl::StatusOr<long long> v = r.Integer(n, "tau", 1);
          if (!v.ok()) return v.status();
          return static_cast<int>(*v);
        }));
  }
  if (root["output_dir"]) {
    DPFAIR_ASSIGN(config.output_dir, r.As<std::string>(root["output_dir"], "output_dir"));
  }
  if (root["jobs"]) DPFAIR_ASSIGN(config.jobs, r.Integer(root["jobs"], "jobs", 1));

  if (absl::Status s = config.Validate(); !s.ok()) {
    return absl::InvalidArgumentError(absl::StrCat(source_name, ": ", s.message()));
  }
  return config;
}

absl::StatusOr<ExperimentConfig> LoadExperimentConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open '", path, "'"));
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string base = std::filesystem::path(path).parent_path().string();
  return ParseExperimentConfig(buffer.str(), path, base);
}

std::string CanonicalConfigJson(const ExperimentConfig& config) {
  Json data{{"kind", DataSourceKindName(config.data.kind)}};
  switch (config.data.kind) {
    case DataSourceKind::kSynthetic:
      data["train"] = SyntheticJson(config.data.synthetic_train);
      data["test"] = SyntheticJson(config.data.synthetic_test);
      break;
    case DataSourceKind::kCsv:
      data["train_path"] = config.data.train_path;
      data["test_path"] = config.data.test_path;
      data["feature_columns"] = config.data.schema.feature_columns;
      data["group_column"] = config.data.schema.group_column;
      data["label_column"] = config.data.schema.label_column;
      data["task"] = TaskKindName(config.data.schema.task);
      break;
    case DataSourceKind::kPriceSeries:
    case DataSourceKind::kSyntheticPrices: {
      if (config.data.kind == DataSourceKind::kPriceSeries) {
        data["path"] = config.data.prices_path;
      } else {
        const PriceSimulationSpec& s = config.data.price_simulation;
        data["simulation"] = Json{{"group_names", s.group_names},
                                  {"series_per_group", s.series_per_group},
                                  {"base_log_volatility", s.base_log_volatility},
                                  {"volatility_of_volatility", s.volatility_of_volatility},
                                  {"persistence", s.persistence},
                                  {"days", s.days},
                                  {"seed", s.seed}};
      }
      const VolatilityTaskSpec& v = config.data.volatility;
      data["volatility"] = Json{{"lookback", v.lookback},
                                {"event_stride", v.event_stride},
                                {"train_fraction", v.train_fraction}};
      break;
    }
  }
  Json levels = Json::array();
  for (const PrivacyLevel& level : config.privacy_levels) {
    Json l{{"label", level.label}};
    l["target_epsilon"] = level.target_epsilon ? Json(*level.target_epsilon) : Json();
    l["noise_multiplier"] =
        level.noise_multiplier ? Json(*level.noise_multiplier) : Json();
    levels.push_back(l);
  }
  std::vector<std::string> objectives;
  for (Objective o : config.objectives) objectives.push_back(ObjectiveName(o));
  Json j{{"name", config.name},
         {"dataset", data},
         {"model",
          {{"family", ModelFamilyName(config.model_family)},
           {"hidden_size", config.hidden_size}}},
         {"training",
          {{"epochs", config.training.epochs},
           {"learning_rate", config.training.learning_rate},
           {"batch_size", config.training.batch_size},
           {"dro_step_size", config.training.dro_step_size}}},
         {"objectives", objectives},
         {"privacy",
          {{"delta", config.delta},
           {"clipping_bound", config.EffectiveClippingBound()},
           {"levels", levels}}},
         {"seeds", config.seeds},
         {"metric", MetricKindName(config.metric)},
         {"taus", config.taus}};
  return j.dump();
}

std::string ConfigFingerprint(const ExperimentConfig& config) {
  return absl::StrFormat("%016x", Fnv1a64(CanonicalConfigJson(config)));
}

absl::StatusOr<ExperimentData> LoadExperimentData(const ExperimentConfig& config,
                                                  std::optional<int> tau) {
  const DataSource& data = config.data;
  switch (data.kind) {
    case DataSourceKind::kSynthetic: {
      const std::vector<std::string> tokens = {"y0_a0", "y1_a0", "y0_a1", "y1_a1"};
      absl::StatusOr<Dataset> train = GenerateSynthetic(data.synthetic_train);
      if (!train.ok()) return train.status();
      absl::StatusOr<Dataset> test = GenerateSynthetic(data.synthetic_test);
      if (!test.ok()) return test.status();
      return ExperimentData{LoadedDataset{*std::move(train), tokens},
                            LoadedDataset{*std::move(test), tokens}};
    }
    case DataSourceKind::kCsv: {
      absl::StatusOr<LoadedDataset> train =
          LoadCsvDataset(data.train_path, data.schema);
      if (!train.ok()) return train.status();
      absl::StatusOr<LoadedDataset> test =
          LoadCsvDataset(data.test_path, data.schema, train->group_tokens);
      if (!test.ok()) return test.status();
      return ExperimentData{*std::move(train), *std::move(test)};
    }
    case DataSourceKind::kPriceSeries:
    case DataSourceKind::kSyntheticPrices: {
      if (!tau.has_value()) {
        return absl::InvalidArgumentError("price-series tasks need a tau");
      }
      absl::StatusOr<std::vector<PriceSeries>> series =
          data.kind == DataSourceKind::kPriceSeries
              ? LoadPriceSeriesCsv(data.prices_path)
              : SimulatePriceSeries(data.price_simulation);
      if (!series.ok()) return series.status();
      VolatilityTaskSpec spec = data.volatility;
      spec.tau = *tau;
      absl::StatusOr<VolatilitySplit> split = BuildVolatilitySplit(*series, spec);
      if (!split.ok()) return split.status();
      return ExperimentData{std::move(split->train), std::move(split->test)};
    }
  }
  return absl::InternalError("unknown data source");
}

}  // namespace dpfair

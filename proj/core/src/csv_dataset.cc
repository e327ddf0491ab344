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

#include "dpfair/csv_dataset.h"

#include <charconv>
#include <fstream>
#include <map>
#include <system_error>

#include "absl/strings/str_cat.h"

namespace dpfair {
namespace {

std::string Location(const std::string& source, size_t line) {
  return absl::StrCat(source, ":", line);
}

bool ParseDouble(const std::string& text, double* out) {
  size_t begin = 0, end = text.size();
  while (begin < end && (text[begin] == ' ' || text[begin] == '\t')) ++begin;
  while (end > begin && (text[end - 1] == ' ' || text[end - 1] == '\t')) --end;
  if (begin == end) return false;
  const char* first = text.data() + begin;
  const char* last = text.data() + end;
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, *out);
  return ec == std::errc() && ptr == last;
}

}  // namespace

absl::StatusOr<std::vector<std::string>> SplitCsvLine(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  if (quoted) return absl::InvalidArgumentError("unterminated quoted field");
  fields.push_back(std::move(field));
  return fields;
}

absl::StatusOr<LoadedDataset> ParseCsvDataset(
    std::istream& in, const CsvSchema& schema, const std::string& source_name,
    const std::optional<std::vector<std::string>>& group_vocabulary) {
  std::string line;
  size_t line_no = 0;
  if (!std::getline(in, line)) {
    return absl::InvalidArgumentError(
        absl::StrCat(source_name, ": empty file, expected a header row"));
  }
  ++line_no;
  // Tolerate a UTF-8 byte-order mark.
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  absl::StatusOr<std::vector<std::string>> header = SplitCsvLine(line);
  if (!header.ok()) {
    return absl::InvalidArgumentError(absl::StrCat(
        Location(source_name, line_no), ": ", header.status().message()));
  }
  std::map<std::string, size_t> column_index;
  for (size_t i = 0; i < header->size(); ++i) column_index[(*header)[i]] = i;

  auto find_column = [&](const std::string& name) -> absl::StatusOr<size_t> {
    auto it = column_index.find(name);
    if (it == column_index.end()) {
      return absl::InvalidArgumentError(
          absl::StrCat(source_name, ": missing column '", name, "' in header"));
    }
    return it->second;
  };
  std::vector<size_t> feature_idx;
  for (const std::string& name : schema.feature_columns) {
    absl::StatusOr<size_t> idx = find_column(name);
    if (!idx.ok()) return idx.status();
    feature_idx.push_back(*idx);
  }
  if (feature_idx.empty()) {
    return absl::InvalidArgumentError("schema declares no feature columns");
  }
  absl::StatusOr<size_t> group_idx = find_column(schema.group_column);
  if (!group_idx.ok()) return group_idx.status();
  absl::StatusOr<size_t> label_idx = find_column(schema.label_column);
  if (!label_idx.ok()) return label_idx.status();

  std::vector<std::string> tokens;
  std::map<std::string, GroupId> token_ids;
  if (group_vocabulary.has_value()) {
    tokens = *group_vocabulary;
    for (size_t i = 0; i < tokens.size(); ++i) {
      token_ids[tokens[i]] = static_cast<GroupId>(i);
    }
  }

  std::vector<Example> examples;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const std::string where = Location(source_name, line_no);
    absl::StatusOr<std::vector<std::string>> fields = SplitCsvLine(line);
    if (!fields.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat(where, ": ", fields.status().message()));
    }
    if (fields->size() != header->size()) {
      return absl::InvalidArgumentError(
          absl::StrCat(where, ": expected ", header->size(), " fields, got ",
                       fields->size()));
    }
    Example ex;
    ex.features.reserve(feature_idx.size());
    for (size_t k = 0; k < feature_idx.size(); ++k) {
      double v;
      const std::string& cell = (*fields)[feature_idx[k]];
      if (!ParseDouble(cell, &v)) {
        return absl::InvalidArgumentError(
            absl::StrCat(where, ": feature column '", schema.feature_columns[k],
                         "' is not numeric: '", cell, "'"));
      }
      ex.features.push_back(v);
    }
    const std::string& label_cell = (*fields)[*label_idx];
    if (!ParseDouble(label_cell, &ex.label)) {
      return absl::InvalidArgumentError(
          absl::StrCat(where, ": label column '", schema.label_column,
                       "' is not numeric: '", label_cell, "'"));
    }
    if (schema.task == TaskKind::kClassification && ex.label != 0.0 &&
        ex.label != 1.0) {
      return absl::InvalidArgumentError(absl::StrCat(
          where, ": classification label must be 0 or 1, got '", label_cell,
          "'"));
    }
    const std::string& token = (*fields)[*group_idx];
    auto it = token_ids.find(token);
    if (it == token_ids.end()) {
      if (group_vocabulary.has_value()) {
        return absl::InvalidArgumentError(
            absl::StrCat(where, ": unknown group token '", token, "'"));
      }
      it = token_ids.emplace(token, static_cast<GroupId>(tokens.size())).first;
      tokens.push_back(token);
    }
    ex.group = it->second;
    examples.push_back(std::move(ex));
  }
  if (examples.empty()) {
    return absl::InvalidArgumentError(
        absl::StrCat(source_name, ": no data rows"));
  }
  const int num_groups = static_cast<int>(tokens.size());
  absl::StatusOr<Dataset> dataset =
      Dataset::Create(std::move(examples), num_groups, schema.task);
  if (!dataset.ok()) {
    return absl::InvalidArgumentError(
        absl::StrCat(source_name, ": ", dataset.status().message()));
  }
  return LoadedDataset{*std::move(dataset), std::move(tokens)};
}

absl::StatusOr<LoadedDataset> LoadCsvDataset(
    const std::string& path, const CsvSchema& schema,
    const std::optional<std::vector<std::string>>& group_vocabulary) {
  std::ifstream in(path);
  if (!in) {
    return absl::NotFoundError(absl::StrCat("cannot open '", path, "'"));
  }
  return ParseCsvDataset(in, schema, path, group_vocabulary);
}

}  // namespace dpfair

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

#ifndef DPFAIR_CSV_DATASET_H_
#define DPFAIR_CSV_DATASET_H_

#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "dpfair/dataset.h"

namespace dpfair {

// Which header columns feed the (x, g, y) triple.
struct CsvSchema {
  std::vector<std::string> feature_columns;
  std::string group_column;
  std::string label_column;
  TaskKind task = TaskKind::kClassification;
};

// A dataset plus the group-token vocabulary: group id i was read as
// group_tokens[i].
struct LoadedDataset {
  Dataset dataset;
  std::vector<std::string> group_tokens;
};

// Splits one CSV record. Fields may be double-quoted; "" inside quotes is a
// literal quote.
absl::StatusOr<std::vector<std::string>> SplitCsvLine(const std::string& line);

// Parses a header-led CSV. Group tokens are mapped to ids densely by first
// appearance unless `group_vocabulary` is given, in which case the ids follow
// the vocabulary and any other token is an error. Row order is preserved.
// Parse errors name the source and the 1-based line number.
absl::StatusOr<LoadedDataset> ParseCsvDataset(
    std::istream& in, const CsvSchema& schema, const std::string& source_name,
    const std::optional<std::vector<std::string>>& group_vocabulary =
        std::nullopt);

absl::StatusOr<LoadedDataset> LoadCsvDataset(
    const std::string& path, const CsvSchema& schema,
    const std::optional<std::vector<std::string>>& group_vocabulary =
        std::nullopt);

}  // namespace dpfair

#endif  // DPFAIR_CSV_DATASET_H_

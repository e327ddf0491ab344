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

#ifndef DPFAIR_GROUP_DISTRIBUTION_H_
#define DPFAIR_GROUP_DISTRIBUTION_H_

#include <cstddef>
#include <vector>

#include "dpfair/dataset.h"

namespace dpfair {

struct GroupDistribution {
  std::vector<size_t> counts;  // indexed by group id
  size_t total = 0;

  double Fraction(GroupId g) const {
    return static_cast<double>(counts[g]) / static_cast<double>(total);
  }
};

GroupDistribution ComputeGroupDistribution(const Dataset& dataset);

}  // namespace dpfair

#endif  // DPFAIR_GROUP_DISTRIBUTION_H_

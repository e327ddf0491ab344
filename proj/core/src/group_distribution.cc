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

#include "dpfair/group_distribution.h"

namespace dpfair {

GroupDistribution ComputeGroupDistribution(const Dataset& dataset) {
  GroupDistribution dist;
  dist.counts.assign(dataset.num_groups(), 0);
  for (const Example& ex : dataset.examples()) ++dist.counts[ex.group];
  dist.total = dataset.size();
  return dist;
}

}  // namespace dpfair

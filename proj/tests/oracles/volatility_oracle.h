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

// Log volatility evaluated at 50 significant digits straight from prices.

#ifndef DPFAIR_TESTS_ORACLES_VOLATILITY_ORACLE_H_
#define DPFAIR_TESTS_ORACLES_VOLATILITY_ORACLE_H_

#include <cstddef>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace dpfair::oracle {

// ln(sqrt(sum_{i=0}^{tau} (r_{t-i} - rbar)^2 / tau)).
inline double LogVolatility(const std::vector<double>& prices, size_t t,
                            int tau) {
  using BigFloat = boost::multiprecision::cpp_bin_float_50;
  std::vector<BigFloat> r;
  for (int i = 0; i <= tau; ++i) {
    const size_t d = t - static_cast<size_t>(i);
    r.push_back(BigFloat(prices[d]) / BigFloat(prices[d - 1]) - 1);
  }
  BigFloat mean = 0;
  for (const BigFloat& v : r) mean += v;
  mean /= static_cast<int>(r.size());
  BigFloat ss = 0;
  for (const BigFloat& v : r) ss += (v - mean) * (v - mean);
  return static_cast<double>(log(sqrt(ss / tau)));
}

}  // namespace dpfair::oracle

#endif  // DPFAIR_TESTS_ORACLES_VOLATILITY_ORACLE_H_

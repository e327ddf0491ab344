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

#ifndef DPFAIR_RNG_H_
#define DPFAIR_RNG_H_

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>

namespace dpfair {

// 64-bit FNV-1a over the bytes of `text`.
uint64_t Fnv1a64(std::string_view text);

// SplitMix64 finalizer; a bijective avalanche mix of `x`.
uint64_t Mix64(uint64_t x);

// A named, seeded stream of random draws.
//
// The draw sequence is a pure function of (seed, label): the engine is
// std::mt19937_64, whose output is fixed by the standard, and the uniform and
// normal transforms are implemented here rather than through the
// implementation-defined <random> distributions. Two streams with the same
// seed but different labels are statistically independent.
class RngStream {
 public:
  RngStream(uint64_t seed, std::string label);

  uint64_t seed() const { return seed_; }
  const std::string& label() const { return label_; }

  // A child stream whose label is "<label>/<child>".
  RngStream Fork(std::string_view child) const;

  uint64_t NextU64() { return engine_(); }

  // Uniform on [0, 1) with 53 bits of resolution.
  double Uniform();
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  // Standard normal via the Box-Muller transform.
  double Normal();
  double Normal(double mean, double stddev) {
    return mean + stddev * Normal();
  }

  bool Bernoulli(double p) { return Uniform() < p; }

 private:
  uint64_t seed_;
  std::string label_;
  std::mt19937_64 engine_;
  std::optional<double> cached_normal_;
};

}  // namespace dpfair

#endif  // DPFAIR_RNG_H_

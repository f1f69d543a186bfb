// Copyright 2026 The calib Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CALIB_RNG_H_
#define CALIB_RNG_H_

#include <cstdint>
#include <random>

namespace calib {

// 64-bit avalanche mix (splitmix64 finalizer).
std::uint64_t Mix64(std::uint64_t z);

// Seed for replicate `index` of an experiment with master seed `master`.
// Independent of evaluation order and thread count.
std::uint64_t DeriveSeed(std::uint64_t master, std::uint64_t index);

// Deterministic generator. Floating-point conversions are done here rather
// than through <random> distributions, whose output is implementation
// defined, so results are reproducible across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t NextU64() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double Uniform01();
  // Uniform on [lo, hi].
  double Uniform(double lo, double hi);
  bool Bernoulli(double p);

 private:
  std::mt19937_64 engine_;
};

}  // namespace calib

#endif  // CALIB_RNG_H_

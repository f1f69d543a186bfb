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
#include <benchmark/benchmark.h>

#include <cmath>

#include "calib/environments.h"
#include "calib/forecasters.h"
#include "calib/harness.h"
#include "calib/rng.h"

namespace calib {
namespace {

void BM_HedgeRound(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  HedgeState h = HedgeInit(k, 1 << 20);
  Rng rng(1);
  for (auto _ : state) {
    const double p = HedgePredict(h, rng);
    HedgeUpdate(h, rng.Bernoulli(0.3) ? 1 : 0, p);
  }
  state.SetComplexityN(k);
}
BENCHMARK(BM_HedgeRound)->RangeMultiplier(4)->Range(4, 4096)->Complexity();

void BM_Episode(benchmark::State& state) {
  const int horizon = static_cast<int>(state.range(0));
  const NatureSpec nature = BinarySearchSpec(0.25 / std::sqrt(horizon), horizon);
  const ForecasterSpec forecaster = TruthfulSpec();
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(RunEpisode(nature, forecaster, ++seed).size());
  }
}
BENCHMARK(BM_Episode)->Arg(1000)->Arg(2000);

}  // namespace
}  // namespace calib

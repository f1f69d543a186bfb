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

#include <cstdint>
#include <vector>

#include "calib/measures.h"
#include "calib/precise.h"
#include "calib/rng.h"

namespace calib {
namespace {

struct Data {
  std::vector<std::uint8_t> x;
  std::vector<double> p;
};

Data MakeData(int horizon, int levels) {
  Rng rng(7);
  Data d;
  for (int t = 0; t < horizon; ++t) {
    const double p = levels > 0
                         ? static_cast<double>(rng.NextU64() % (levels + 1)) / levels
                         : rng.Uniform01();
    d.p.push_back(p);
    d.x.push_back(rng.Bernoulli(p) ? 1 : 0);
  }
  return d;
}

void BM_StepCE(benchmark::State& state) {
  const Data d = MakeData(static_cast<int>(state.range(0)), 0);
  for (auto _ : state) benchmark::DoNotOptimize(StepCE(d.x, d.p).value);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_StepCE)->RangeMultiplier(10)->Range(100, 100000)->Complexity();

void BM_VCal(benchmark::State& state) {
  const Data d = MakeData(static_cast<int>(state.range(0)), 0);
  for (auto _ : state) benchmark::DoNotOptimize(VCal(d.x, d.p).value);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_VCal)->RangeMultiplier(10)->Range(100, 100000)->Complexity();

void BM_VCalPrecise(benchmark::State& state) {
  const Data d = MakeData(static_cast<int>(state.range(0)), 0);
  const std::vector<Precise> p(d.p.begin(), d.p.end());
  for (auto _ : state) benchmark::DoNotOptimize(VCal(d.x, p).value);
}
BENCHMARK(BM_VCalPrecise)->Arg(100)->Arg(1000);

void BM_SmoothCE(benchmark::State& state) {
  const Data d = MakeData(static_cast<int>(state.range(0)), 0);
  for (auto _ : state) benchmark::DoNotOptimize(SmoothCE(d.x, d.p).value);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SmoothCE)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

void BM_StepCESub(benchmark::State& state) {
  const Data d = MakeData(static_cast<int>(state.range(0)), 20);
  for (auto _ : state) {
    SubsetSampler sampler(100, 3);
    benchmark::DoNotOptimize(StepCESub(d.x, d.p, sampler).value);
  }
}
BENCHMARK(BM_StepCESub)->Arg(1000)->Arg(10000);

void BM_StepCESubExact(benchmark::State& state) {
  const Data d = MakeData(static_cast<int>(state.range(0)), 10);
  for (auto _ : state) benchmark::DoNotOptimize(StepCESubExact(d.x, d.p).value);
}
BENCHMARK(BM_StepCESubExact)->DenseRange(8, 20, 4);

}  // namespace
}  // namespace calib

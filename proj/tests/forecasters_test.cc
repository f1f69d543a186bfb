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
#include "calib/forecasters.h"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "calib/rng.h"

namespace calib {
namespace {

double Sum(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0);
}

TEST(SimpleForecastersTest, Truthful) {
  EXPECT_EQ(TruthfulPrediction(0.37), 0.37);
  EXPECT_EQ(TruthfulPrediction(0.0), 0.0);
  EXPECT_EQ(TruthfulPrediction(1.0), 1.0);
  auto f = MakeForecaster(TruthfulSpec(), 10);
  Rng rng(1);
  EXPECT_EQ(f->Predict(0.37, rng), 0.37);
  EXPECT_TRUE(f->IsTruthful());
}

TEST(SimpleForecastersTest, Constant) {
  EXPECT_EQ(ConstantPrediction(0.5), 0.5);
  EXPECT_EQ(ConstantPrediction(0.0), 0.0);
  EXPECT_EQ(ConstantPrediction(1.0), 1.0);
  EXPECT_THROW(ConstantPrediction(1.5), std::invalid_argument);
  EXPECT_THROW(MakeForecaster(ForecasterSpec{ForecasterKind::kConstant}, 4),
               std::invalid_argument);
}

TEST(SimpleForecastersTest, HedgingFifths) {
  auto f = MakeForecaster(HedgingFifthsForecasterSpec(), 4);
  Rng rng(1);
  std::vector<double> p;
  for (int t = 0; t < 4; ++t) {
    p.push_back(f->Predict(0.2, rng));
    f->Observe(0, p.back());
  }
  EXPECT_EQ(p, (std::vector<double>{0.4, 0.4, 0.6, 0.6}));
  EXPECT_EQ(HedgingFifthsPrediction(1, 10), 0.4);
  EXPECT_EQ(HedgingFifthsPrediction(10, 10), 0.6);
}

// Feeds scripted outcomes and returns the predictions.
std::vector<double> RunPatching(double c, int horizon,
                                const std::vector<int>& x) {
  PatchingForecaster f(c, horizon);
  Rng rng(1);
  std::vector<double> p;
  for (int t = 0; t < horizon; ++t) {
    p.push_back(f.Predict(0.5, rng));
    f.Observe(static_cast<std::uint8_t>(x[t]), p.back());
  }
  return p;
}

TEST(PatchingForecasterTest, RequiresMultipleOfTen) {
  EXPECT_THROW(PatchingForecaster(0.1, 25), std::invalid_argument);
}

TEST(PatchingForecasterTest, DeficitBranch) {
  // T = 20: first 4 steps at 1/2 with x = 0 give Delta = -2.
  const int horizon = 20;
  std::vector<int> x(horizon, 1);
  for (int t = 0; t < 4; ++t) x[t] = 0;
  const auto p = RunPatching(0.1, horizon, x);
  for (int t = 0; t < 4; ++t) EXPECT_EQ(p[t], 0.5);
  for (int t = 4; t < 12; ++t) EXPECT_EQ(p[t], 0.05);
  // Tail: 1/2 until the bias at 1/2 reaches zero (four ones), then 1 - c/2.
  for (int t = 12; t < 16; ++t) EXPECT_EQ(p[t], 0.5);
  for (int t = 16; t < 20; ++t) EXPECT_EQ(p[t], 0.95);
}

TEST(PatchingForecasterTest, SurplusBranch) {
  // Delta = +1 after the first 4 steps (three ones).
  const int horizon = 20;
  std::vector<int> x = {1, 1, 1, 0};
  x.resize(horizon, 0);
  const auto p = RunPatching(0.2, horizon, x);
  for (int t = 0; t < 4; ++t) EXPECT_EQ(p[t], 0.5);
  // Middle block: 1/2 while the bias is positive (two zeros cancel +1), then c/2.
  EXPECT_EQ(p[4], 0.5);
  EXPECT_EQ(p[5], 0.5);
  for (int t = 6; t < 12; ++t) EXPECT_EQ(p[t], 0.1);
  for (int t = 12; t < 20; ++t) EXPECT_EQ(p[t], 0.9);
}

TEST(PatchingForecasterTest, TracksBiasAtHalf) {
  PatchingForecaster f(0.1, 10);
  Rng rng(1);
  for (int x : {1, 1}) f.Observe(static_cast<std::uint8_t>(x), f.Predict(0.5, rng));
  EXPECT_EQ(f.bias_at_half(), 1.0);
}

TEST(HedgeTest, InitUniform) {
  const HedgeState s = HedgeInit(2, 100);
  ASSERT_EQ(s.weights.size(), 4u);
  for (double w : s.weights) EXPECT_EQ(w, 0.25);
  EXPECT_DOUBLE_EQ(HedgeInit(100, 100).eta, std::sqrt(8.0 * std::log(200.0) / 100));
  EXPECT_EQ(HedgeInit(5, 10, 0.3).eta, 0.3);
  EXPECT_THROW(HedgeInit(1, 10), std::invalid_argument);
}

TEST(HedgeTest, UniformWeightsPredictOne) {
  const HedgeState s = HedgeInit(5, 100);
  const HedgeDecision d = HedgeDecide(s);
  EXPECT_EQ(d.branch, HedgeDecision::Branch::kAllNonNegative);
  for (double c : d.c) EXPECT_EQ(c, 0.0);
  Rng rng(1);
  EXPECT_EQ(HedgePredict(s, rng), 1.0);
}

TEST(HedgeTest, MixedBranchSolvesForQ) {
  // k = 2 with C = (0.2, -0.3): weights (+1,1)=0.5, (+1,2)=0, (-1,1)=0, (-1,2)=0.3.
  HedgeState s = HedgeInit(2, 10);
  s.weights = {0.5, 0.0, 0.0, 0.3};
  const HedgeDecision d = HedgeDecide(s);
  ASSERT_EQ(d.branch, HedgeDecision::Branch::kMixed);
  EXPECT_NEAR(d.c[0], 0.2, 1e-15);
  EXPECT_NEAR(d.c[1], -0.3, 1e-15);
  EXPECT_EQ(d.j_low, 1);
  EXPECT_NEAR(d.q, 0.6, 1e-15);
  EXPECT_NEAR(d.q * d.c[0] + (1 - d.q) * d.c[1], 0.0, 1e-15);

  Rng rng(2);
  int low = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) low += HedgePredict(s, rng) == 0.0;
  EXPECT_NEAR(static_cast<double>(low) / n, 0.6, 0.01);
}

TEST(HedgeTest, AllNonPositivePredictsZero) {
  HedgeState s = HedgeInit(3, 10);
  s.weights = {0.0, 0.0, 0.0, 0.2, 0.3, 0.5};
  const HedgeDecision d = HedgeDecide(s);
  EXPECT_EQ(d.branch, HedgeDecision::Branch::kAllNonPositive);
  Rng rng(3);
  EXPECT_EQ(HedgePredict(s, rng), 0.0);
}

TEST(HedgeTest, ZeroLossRoundLeavesWeights) {
  HedgeState s = HedgeInit(4, 10);
  const auto before = s.weights;
  HedgeUpdate(s, 1, 1.0);
  for (std::size_t i = 0; i < before.size(); ++i) {
    EXPECT_NEAR(s.weights[i], before[i], 1e-15);
  }
  EXPECT_EQ(s.steps, 1);
}

TEST(HedgeTest, SingleUpdateTiltsTowardPositiveSign) {
  HedgeState s = HedgeInit(2, 100);
  HedgeUpdate(s, 1, 0.0);
  EXPECT_NEAR(s.weights[0] / s.weights[2], std::exp(s.eta), 1e-12);
  EXPECT_NEAR(s.weights[1] / s.weights[3], std::exp(s.eta), 1e-12);
  EXPECT_NEAR(Sum(s.weights), 1.0, 1e-12);
  EXPECT_EQ(s.cumulative_cost[0], 0.0);
  EXPECT_EQ(s.cumulative_cost[2], 1.0);
}

TEST(HedgeTest, RejectsOffGridPrediction) {
  HedgeState s = HedgeInit(3, 10);
  EXPECT_THROW(HedgeUpdate(s, 1, 0.3), std::invalid_argument);
}

TEST(HedgeTest, WeightsStayNormalizedAndMixedBranchBalances) {
  const int k = 17;
  HedgeState s = HedgeInit(k, 500);
  Rng rng(4);
  for (int t = 0; t < 500; ++t) {
    const HedgeDecision d = HedgeDecide(s);
    if (d.branch == HedgeDecision::Branch::kMixed) {
      EXPECT_NEAR(d.q * d.c[d.j_low - 1] + (1 - d.q) * d.c[d.j_low], 0.0, 1e-12);
    }
    const double p = HedgePredict(s, rng);
    HedgeUpdate(s, rng.Bernoulli(0.3) ? 1 : 0, p);
    for (double w : s.weights) EXPECT_GE(w, 0.0);
    EXPECT_NEAR(Sum(s.weights), 1.0, 1e-12);
  }
}

TEST(HedgeTest, ForecasterUsesHorizonForK) {
  auto f = MakeForecaster(HedgeStepSpec(0), 11);
  Rng rng(5);
  for (int t = 0; t < 11; ++t) {
    const double p = f->Predict(0.5, rng);
    const double scaled = p * 10;
    EXPECT_NEAR(scaled, std::round(scaled), 1e-12);
    f->Observe(1, p);
  }
}

}  // namespace
}  // namespace calib

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
#include "calib/measures.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "calib/oracle.h"
#include "calib/precise.h"
#include "calib/rng.h"
#include "calib/types.h"

namespace calib {
namespace {

using X = EventSequence;
using P = PredictionSequence;

TEST(StepCETest, PerfectPredictionsScoreZero) {
  EXPECT_EQ(StepCE(X{0, 1, 1, 0}, P{0, 1, 1, 0}).value, 0.0);
}

TEST(StepCETest, HedgedPairKeepsResidualAboveThreeQuarters) {
  const MeasureValue v = StepCE(X{0, 1}, P{0, 0.75});
  EXPECT_NEAR(v.value, 0.25, 1e-15);
  EXPECT_EQ(v.exactness, Exactness::kExact);
  EXPECT_EQ(v.kind, MeasureKind::kStep);
}

TEST(StepCETest, SingleLevelIsAbsoluteBias) {
  const X x = {1, 1, 1, 0, 1, 0, 1};
  const P p(x.size(), 0.5);
  EXPECT_DOUBLE_EQ(StepCE(x, p).value, std::abs(5.0 - 3.5));
}

TEST(StepCETest, EmptyInputIsZero) {
  EXPECT_EQ(StepCE(X{}, P{}).value, 0.0);
}

TEST(StepCETest, RejectsMismatchedLengths) {
  EXPECT_THROW(StepCE(X{0, 1}, P{0.5}), std::invalid_argument);
}

TEST(StepCETest, RejectsInvalidEntries) {
  EXPECT_THROW(StepCE(X{2}, P{0.5}), std::invalid_argument);
  EXPECT_THROW(StepCE(X{1}, P{1.5}), std::invalid_argument);
  EXPECT_THROW(StepCE(X{1}, P{std::nan("")}), std::invalid_argument);
}

TEST(StepCETest, TiesAreGroupedBeforePrefixSums) {
  // Residuals at 0.5 cancel; a split at the tied level would see 0.5.
  EXPECT_DOUBLE_EQ(StepCE(X{1, 0}, P{0.5, 0.5}).value, 0.0);
}

TEST(StepCESubTest, ExactSingleStep) {
  EXPECT_NEAR(StepCESubExact(X{1}, P{0.3}).value, 0.35, 1e-15);
}

TEST(StepCESubTest, ExactEmpty) {
  EXPECT_EQ(StepCESubExact(X{}, P{}).value, 0.0);
}

TEST(StepCESubTest, ExactRejectsLongInputs) {
  const X x(21, 1);
  const P p(21, 0.5);
  EXPECT_THROW(StepCESubExact(x, p), CapabilityError);
}

TEST(StepCESubTest, SamplerNeedsReplicates) {
  EXPECT_THROW(SubsetSampler(0, 1), std::invalid_argument);
}

TEST(StepCESubTest, MonteCarloMatchesExact) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const Instance in = RandomInstance(100 + s, 10);
    SubsetSampler sampler(10000, s);
    const MeasureValue mc = StepCESub(in.x, in.p, sampler);
    const double exact = StepCESubExact(in.x, in.p).value;
    ASSERT_TRUE(mc.std_error.has_value());
    EXPECT_EQ(mc.exactness, Exactness::kMonteCarlo);
    EXPECT_EQ(mc.replicates, 10000u);
    EXPECT_LE(std::abs(mc.value - exact), 3 * *mc.std_error + 1e-12);
  }
}

TEST(StepCESubTest, AtLeastHalfOfStepCE) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const Instance in = RandomInstance(200 + s, 1 + s % 14);
    EXPECT_GE(StepCESubExact(in.x, in.p).value + 1e-12,
              0.5 * StepCE(in.x, in.p).value);
    SubsetSampler sampler(200, s);
    const MeasureValue mc = StepCESub(in.x, in.p, sampler);
    EXPECT_GE(mc.value + 3 * mc.std_error.value_or(0.0) + 1e-12,
              0.5 * StepCE(in.x, in.p).value);
  }
}

TEST(StepCESubTest, BinaryTruthIsZeroOnEverySubset) {
  const X x = {1, 0, 0, 1, 1};
  const P p = {1, 0, 0, 1, 1};
  SubsetSampler sampler(64, 3);
  const MeasureValue v = StepCESub(x, p, sampler);
  EXPECT_EQ(v.value, 0.0);
  EXPECT_EQ(v.std_error.value_or(-1), 0.0);
}

TEST(StepCESubTest, SameSeedSameEstimate) {
  const Instance in = RandomInstance(9, 30);
  SubsetSampler a(100, 42), b(100, 42);
  EXPECT_EQ(StepCESub(in.x, in.p, a).value, StepCESub(in.x, in.p, b).value);
}

TEST(VCalTest, HedgedPairHasZeroVCal) {
  EXPECT_EQ(VCal(X{0, 1}, P{0, 0.75}).value, 0.0);
}

TEST(VCalTest, SupremumTakenAsOneSidedLimit) {
  EXPECT_NEAR(VCal(X{1, 0}, P{0.4, 0.6}).value, 1.2, 1e-12);
}

TEST(VCalTest, ConfidentCorrectPredictions) {
  EXPECT_EQ(VCal(X{1, 1}, P{1, 1}).value, 0.0);
}

TEST(UCalBoundsTest, Examples) {
  const MeasureValue zero = UCalBounds(X{0, 1}, P{0, 0.75});
  EXPECT_EQ(zero.exactness, Exactness::kInterval);
  EXPECT_EQ(zero.lower, 0.0);
  EXPECT_EQ(zero.upper, 0.0);

  const MeasureValue v = UCalBounds(X{1, 0}, P{0.4, 0.6});
  EXPECT_NEAR(v.lower, 1.2, 1e-12);
  EXPECT_NEAR(v.upper, 2.4, 1e-12);
  EXPECT_EQ(v.value, v.lower);

  const MeasureValue empty = UCalBounds(X{}, P{});
  EXPECT_EQ(empty.lower, 0.0);
  EXPECT_EQ(empty.upper, 0.0);
}

TEST(SignCETest, Examples) {
  EXPECT_NEAR(SignCE(X{0, 1}, P{0, 0.75}).value, 0.25, 1e-15);
  EXPECT_EQ(SignCE(X{0, 1, 1}, P{0, 1, 1}).value, 0.0);
}

TEST(EceTest, Examples) {
  EXPECT_EQ(Ece(X{0, 1}, P{0.5, 0.5}).value, 0.0);
  EXPECT_NEAR(Ece(X{0, 1}, P{0, 0.75}).value, 0.25, 1e-15);
}

TEST(SmoothCETest, Examples) {
  EXPECT_NEAR(SmoothCE(X{1}, P{0.5}).value, 0.5, 1e-15);
  EXPECT_NEAR(SmoothCE(X{1, 0}, P{0.3, 0.6}).value, 0.28, 1e-12);
  EXPECT_EQ(SmoothCE(X{1, 0, 1}, P{1, 0, 1}).value, 0.0);
}

TEST(SmoothCETest, LipschitzLimitsTheSecondLevel) {
  // Weights 0.9 at 0.1 and -0.9 at 0.9: f = 1 then 0.2.
  EXPECT_NEAR(SmoothCE(X{1, 0}, P{0.1, 0.9}).value, 0.9 - 0.9 * 0.2, 1e-12);
}

TEST(SmoothCETest, AgreesWithGridOracleOnTenths) {
  // Levels on multiples of 0.1 put the optimum on the oracle's grid.
  std::size_t checked = 0;
  for (std::uint64_t s = 0; checked < 200; ++s) {
    Rng rng(s);
    const std::size_t horizon = 1 + rng.NextU64() % 10;
    X x(horizon);
    P p(horizon);
    for (std::size_t t = 0; t < horizon; ++t) {
      x[t] = rng.Bernoulli(0.5);
      p[t] = static_cast<double>(rng.NextU64() % 11) / 10.0;
    }
    P q = p;
    std::sort(q.begin(), q.end());
    if (std::unique(q.begin(), q.end()) - q.begin() > 6) continue;
    ++checked;
    EXPECT_NEAR(SmoothCE(x, p).value, SmoothGridOracle(x, p, 0.005), 1e-9);
  }
}

TEST(SsceTest, ExhaustiveSingleStep) {
  EXPECT_NEAR(SsceExact(X{1}, P{0.5}).value, 0.25, 1e-15);
}

TEST(SsceTest, BinaryTruthIsZero) {
  SubsetSampler sampler(32, 1);
  EXPECT_EQ(Ssce(X{1, 0, 1}, P{1, 0, 1}, sampler).value, 0.0);
  EXPECT_EQ(SsceExact(X{1, 0, 1}, P{1, 0, 1}).value, 0.0);
}

TEST(SsceTest, MonteCarloMatchesExhaustive) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const Instance in = RandomInstance(300 + s, 8);
    SubsetSampler sampler(4000, s);
    const MeasureValue mc = Ssce(in.x, in.p, sampler);
    EXPECT_LE(std::abs(mc.value - SsceExact(in.x, in.p).value),
              3 * mc.std_error.value_or(0.0) + 1e-12);
  }
}

TEST(SsceTest, ExhaustiveRejectsLongInputs) {
  EXPECT_THROW(SsceExact(X(17, 0), P(17, 0.5)), CapabilityError);
}

TEST(GammaTest, Branches) {
  EXPECT_EQ(Gamma(0.5), 0.5);
  EXPECT_EQ(Gamma(4.0), 2.0);
  EXPECT_EQ(Gamma(1.0), 1.0);
  EXPECT_EQ(Gamma(0.0), 0.0);
  EXPECT_THROW(Gamma(-1e-9), std::invalid_argument);
}

TEST(MeasurePropertyTest, InequalitiesOnRandomInstances) {
  for (std::uint64_t s = 0; s < 500; ++s) {
    const Instance in = RandomInstance(DeriveSeed(5, s), 1 + s % 12);
    const double step = StepCE(in.x, in.p).value;
    const double sign = SignCE(in.x, in.p).value;
    const double vcal = VCal(in.x, in.p).value;
    double abs_sum = 0.0;
    for (std::size_t t = 0; t < in.x.size(); ++t) {
      abs_sum += std::abs(in.x[t] - in.p[t]);
    }
    EXPECT_LE(sign / 3, step + 1e-12);
    EXPECT_LE(step, sign + 1e-12);
    EXPECT_GE(step + 1e-12, vcal / 8);
    EXPECT_LE(step, Ece(in.x, in.p).value + 1e-12);
    EXPECT_LE(step, abs_sum + 1e-12);
    EXPECT_GE(step, 0.0);
    EXPECT_GE(vcal, 0.0);
    EXPECT_GE(SmoothCE(in.x, in.p).value, 0.0);
  }
}

TEST(MeasurePropertyTest, PermutationInvariance) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const Instance in = RandomInstance(DeriveSeed(6, s), 12);
    std::vector<std::size_t> order(in.x.size());
    std::iota(order.begin(), order.end(), 0);
    std::reverse(order.begin(), order.end());
    std::rotate(order.begin(), order.begin() + s % order.size(), order.end());
    X x;
    P p;
    for (std::size_t i : order) {
      x.push_back(in.x[i]);
      p.push_back(in.p[i]);
    }
    EXPECT_NEAR(StepCE(x, p).value, StepCE(in.x, in.p).value, 1e-12);
    EXPECT_NEAR(VCal(x, p).value, VCal(in.x, in.p).value, 1e-12);
    EXPECT_NEAR(SignCE(x, p).value, SignCE(in.x, in.p).value, 1e-12);
    EXPECT_NEAR(Ece(x, p).value, Ece(in.x, in.p).value, 1e-12);
    EXPECT_NEAR(SmoothCE(x, p).value, SmoothCE(in.x, in.p).value, 1e-12);
    EXPECT_NEAR(StepCESubExact(x, p).value, StepCESubExact(in.x, in.p).value,
                1e-12);
  }
}

TEST(MeasurePropertyTest, SignAgreesWithFineGrid) {
  for (std::uint64_t s = 0; s < 100; ++s) {
    const Instance in = RandomInstance(DeriveSeed(7, s), 1 + s % 12);
    EXPECT_NEAR(SignCE(in.x, in.p).value,
                GridSupOracle(in.x, in.p, GridObjective::kSign, 1e-5), 1e-9);
  }
}

TEST(MeasurePropertyTest, VCalWithinBreakpointOffsetOfFineGrid) {
  // The grid samples a +/- 1e-7 around each level, so it misses the one-sided
  // limits by at most 2 * T * 1e-7.
  for (std::uint64_t s = 0; s < 100; ++s) {
    const Instance in = RandomInstance(DeriveSeed(8, s), 1 + s % 12);
    const double exact = VCal(in.x, in.p).value;
    const double grid = GridSupOracle(in.x, in.p, GridObjective::kVCal, 1e-5);
    EXPECT_GE(exact + 1e-12, grid);
    EXPECT_LE(exact, grid + 2.0 * in.x.size() * 1e-7 + 1e-12);
  }
}

TEST(PreciseTest, MatchesDoubleOnDoubleInputs) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const Instance in = RandomInstance(DeriveSeed(9, s), 1 + s % 12);
    std::vector<Precise> p(in.p.begin(), in.p.end());
    EXPECT_NEAR(StepCE(in.x, std::span<const Precise>(p)).value,
                StepCE(in.x, in.p).value, 1e-12);
    EXPECT_NEAR(VCal(in.x, std::span<const Precise>(p)).value,
                VCal(in.x, in.p).value, 1e-12);
    EXPECT_NEAR(SignCE(in.x, std::span<const Precise>(p)).value,
                SignCE(in.x, in.p).value, 1e-12);
    EXPECT_NEAR(Ece(in.x, std::span<const Precise>(p)).value,
                Ece(in.x, in.p).value, 1e-12);
  }
}

TEST(PreciseTest, SeparatesLevelsThatCollideInDouble) {
  // 0.5 + 2^-80 rounds to 0.5 in double.
  const Precise tiny = boost::multiprecision::ldexp(Precise(1), -80);
  const std::vector<Precise> p = {Precise(0.5), Precise(0.5) + tiny};
  const X x = {1, 0};
  // Distinct levels: prefix at the lower level keeps its 0.5 residual.
  EXPECT_NEAR(StepCE(x, std::span<const Precise>(p)).value, 0.5, 1e-12);
  EXPECT_NEAR(StepCE(x, P{0.5, 0.5}).value, 0.0, 1e-12);
}

}  // namespace
}  // namespace calib

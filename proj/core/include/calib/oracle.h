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
#ifndef CALIB_ORACLE_H_
#define CALIB_ORACLE_H_

// Slow reference evaluators used to cross-check the measures.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "calib/types.h"

namespace calib {

enum class GridObjective { kStep, kSign, kVCal };

inline constexpr double kMaxOracleGridStep = 1e-3;
inline constexpr double kOracleBreakpointOffset = 1e-7;
inline constexpr std::size_t kMaxSubsetOracleHorizon = 16;
inline constexpr std::size_t kMaxSmoothOracleLevels = 6;

// Maximum of the objective over a in {0, h, 2h, ..., 1} together with every
// p_t and p_t +/- 1e-7 (clipped to [0, 1]). Throws std::invalid_argument
// unless 0 < grid_step <= 1e-3.
double GridSupOracle(std::span<const std::uint8_t> x, std::span<const double> p,
                     GridObjective objective, double grid_step);

// Exact average of `inner` over all 2^T subsets, evaluated subset by subset.
// Inner measures: kStep, kSign, kVCal, kEce, kSmooth. Throws CapabilityError
// for T > 16.
double SubsetEnumerationOracle(std::span<const std::uint8_t> x,
                               std::span<const double> p, MeasureKind inner);

// Maximizes sum_j w_j f_j over f_j on the grid {-1, -1 + h, ..., 1} with
// |f_{j+1} - f_j| <= q_{j+1} - q_j, by a dynamic program over grid values.
// Throws CapabilityError above 6 distinct levels and std::invalid_argument
// unless 2 / f_grid_step is a positive integer.
double SmoothGridOracle(std::span<const std::uint8_t> x,
                        std::span<const double> p, double f_grid_step);
// The grid optimum is at most this far below the true supremum:
// levels * h * sum_j |w_j|.
double SmoothGridSlack(std::span<const std::uint8_t> x,
                       std::span<const double> p, double f_grid_step);

struct OracleReport {
  MeasureKind measure = MeasureKind::kStep;
  double optimized = 0.0;
  double oracle = 0.0;
  double abs_diff = 0.0;
  double tolerance = 0.0;  // allowed |optimized - oracle|
  std::string instance;
};

struct Instance {
  EventSequence x;
  PredictionSequence p;
};

// Random instance of length T: x uniform bits; p drawn either from the
// tenths {0, 0.1, ..., 1} (to create ties) or uniformly on [0, 1].
Instance RandomInstance(std::uint64_t seed, std::size_t horizon);

struct OracleBatteryConfig {
  std::size_t instances = 1000;
  std::size_t max_horizon = 12;
  std::uint64_t seed = 1;
  double grid_step = 1e-3;
  double f_grid_step = 0.005;
};

// Instance `index` of a battery run with `config`.
Instance BatteryInstance(const OracleBatteryConfig& config, std::size_t index);

// Cross-checks StepCE, SignCE and VCal against the grid oracle, the exact
// subsampled step measure and SSCE against subset enumeration, and SmoothCE
// against the grid oracle (on instances with at most 6 levels).
std::vector<OracleReport> RunOracleBattery(const OracleBatteryConfig& config);

}  // namespace calib

#endif  // CALIB_ORACLE_H_

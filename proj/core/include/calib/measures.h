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
#ifndef CALIB_MEASURES_H_
#define CALIB_MEASURES_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "calib/precise.h"
#include "calib/rng.h"
#include "calib/types.h"

namespace calib {

// Predictions grouped into distinct levels (exact equality), sorted
// ascending. residual[j] = ones[j] - count[j] * level[j], i.e. the sum of
// x_t - p_t over the steps predicted at level[j].
template <class Real>
struct LevelTable {
  std::vector<Real> level;
  std::vector<std::int64_t> count;
  std::vector<std::int64_t> ones;
  std::vector<Real> residual;

  std::size_t size() const { return level.size(); }
};

// (x, p) sorted once by prediction so that subsamples can be regrouped in
// linear time.
template <class Real>
class SortedInstance {
 public:
  SortedInstance(std::span<const std::uint8_t> x, std::span<const Real> p);

  std::size_t horizon() const { return x_.size(); }
  std::size_t num_levels() const { return levels_.size(); }

  LevelTable<Real> Levels() const;
  // Restricted to the steps t with mask[t] == 1. Levels left empty by the
  // mask are kept with zero count; every evaluator below treats them as
  // absent.
  LevelTable<Real> Levels(std::span<const std::uint8_t> mask) const;

 private:
  std::vector<std::uint8_t> x_;
  std::vector<std::size_t> order_;
  std::vector<std::size_t> level_start_;  // offsets into order_, plus end
  std::vector<Real> levels_;
};

// Exact suprema on a level table. Every evaluator returns a value >= 0.
template <class Real>
Real StepFromLevels(const LevelTable<Real>& t);
template <class Real>
Real VCalFromLevels(const LevelTable<Real>& t);
template <class Real>
Real SignFromLevels(const LevelTable<Real>& t);
template <class Real>
Real EceFromLevels(const LevelTable<Real>& t);
template <class Real>
Real SmoothFromLevels(const LevelTable<Real>& t);

// Independent fair-coin subsets S of [T].
class SubsetSampler {
 public:
  // Throws std::invalid_argument when replicates == 0.
  SubsetSampler(std::size_t replicates, std::uint64_t seed);

  std::size_t replicates() const { return replicates_; }
  SubsetMask Next(std::size_t horizon);

 private:
  std::size_t replicates_;
  Rng rng_;
};

inline constexpr std::size_t kMaxStepSubExactHorizon = 20;
inline constexpr std::size_t kMaxSsceExactHorizon = 16;

// sup_a |sum_t (x_t - p_t) 1{p_t <= a}|.
MeasureValue StepCE(std::span<const std::uint8_t> x, std::span<const double> p);
MeasureValue StepCE(std::span<const std::uint8_t> x,
                    std::span<const Precise> p);

// Mean over sampled subsets of the step calibration error restricted to the
// subset, with standard error over the samples.
MeasureValue StepCESub(std::span<const std::uint8_t> x,
                       std::span<const double> p, SubsetSampler& sampler);
MeasureValue StepCESub(std::span<const std::uint8_t> x,
                       std::span<const Precise> p, SubsetSampler& sampler);

// Exact expectation over all 2^T subsets. Throws CapabilityError for
// T > kMaxStepSubExactHorizon.
MeasureValue StepCESubExact(std::span<const std::uint8_t> x,
                            std::span<const double> p);

// V-Calibration through its threshold form:
//   2 sup_a max{X_-(a) - a N_-(a), a N_+(a) - X_+(a)}
// with strict inequalities in the counts. The supremum is taken over one-sided
// limits at every level, so it is returned even when it is not attained.
MeasureValue VCal(std::span<const std::uint8_t> x, std::span<const double> p);
MeasureValue VCal(std::span<const std::uint8_t> x,
                  std::span<const Precise> p);

MeasureValue VCalSub(std::span<const std::uint8_t> x,
                     std::span<const double> p, SubsetSampler& sampler);
MeasureValue VCalSub(std::span<const std::uint8_t> x,
                     std::span<const Precise> p, SubsetSampler& sampler);

// Certified enclosure [VCal, 2 VCal] of the U-Calibration error.
MeasureValue UCalBounds(std::span<const std::uint8_t> x,
                        std::span<const double> p);
MeasureValue UCalBounds(std::span<const std::uint8_t> x,
                        std::span<const Precise> p);

// sup_a |sum_t (x_t - p_t) sgn(a - p_t)|, sgn(0) = 0.
MeasureValue SignCE(std::span<const std::uint8_t> x, std::span<const double> p);
MeasureValue SignCE(std::span<const std::uint8_t> x,
                    std::span<const Precise> p);

// Sum over distinct levels of |sum of residuals at that level|.
MeasureValue Ece(std::span<const std::uint8_t> x, std::span<const double> p);
MeasureValue Ece(std::span<const std::uint8_t> x, std::span<const Precise> p);

// Smooth calibration error, sup over 1-Lipschitz f: [0,1] -> [-1,1] of
// sum_t f(p_t)(x_t - p_t). Solved exactly by a forward dynamic program over
// concave piecewise-linear value functions.
MeasureValue SmoothCE(std::span<const std::uint8_t> x,
                      std::span<const double> p);

// Subsampled smooth calibration error.
MeasureValue Ssce(std::span<const std::uint8_t> x, std::span<const double> p,
                  SubsetSampler& sampler);
// Exhaustive over all subsets. Throws CapabilityError for
// T > kMaxSsceExactHorizon.
MeasureValue SsceExact(std::span<const std::uint8_t> x,
                       std::span<const double> p);

// gamma(v) = v for v <= 1, sqrt(v) above. Throws for v < 0.
double Gamma(double v);

}  // namespace calib

#endif  // CALIB_MEASURES_H_

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
#ifndef CALIB_STATISTICS_H_
#define CALIB_STATISTICS_H_

#include <cstddef>
#include <span>
#include <vector>

namespace calib {

// Pairwise (cascade) summation. The result depends only on the order of the
// input, never on how the caller produced it, which keeps parallel
// aggregation reproducible.
double PairwiseSum(std::span<const double> values);

struct SampleSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation (n - 1 denominator)
  double std_error = 0.0;
  double min = 0.0;
  double max = 0.0;
};

SampleSummary Summarize(std::span<const double> values);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual_ss = 0.0;
  double max_residual = 0.0;  // max of y - fitted
};

// Ordinary least squares y = intercept + slope * x. Needs >= 2 distinct xs.
LineFit FitLine(std::span<const double> xs, std::span<const double> ys);

}  // namespace calib

#endif  // CALIB_STATISTICS_H_

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
#ifndef CALIB_HARNESS_H_
#define CALIB_HARNESS_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "calib/environments.h"
#include "calib/forecasters.h"
#include "calib/precise.h"
#include "calib/types.h"

namespace calib {

struct Transcript {
  EventSequence x;
  PredictionSequence pstar;
  PredictionSequence p;
  double var_T = 0.0;  // sum_t p*_t (1 - p*_t)
  // Exact copies, filled when the nature tracks p* beyond double precision.
  // p_precise is only filled for truthful forecasters (then p = p*).
  std::vector<Precise> pstar_precise;
  std::vector<Precise> p_precise;

  std::size_t size() const { return x.size(); }
};

double RealizedVariance(const PredictionSequence& pstar);

// Runs one episode. Nature draws, outcomes and forecaster randomness use
// separate streams derived from `seed`, so two forecasters run with the same
// seed against a non-adaptive nature see the same p* and the same uniforms
// behind x. Throws std::invalid_argument on invalid specs.
Transcript RunEpisode(const NatureSpec& nature, const ForecasterSpec& forecaster,
                      std::uint64_t seed);

struct EvalOptions {
  // Subsets drawn per evaluation for the Monte Carlo subsampled measures.
  std::size_t subsamples = 200;
};

// Evaluates a measure on a transcript, on the exact predictions when present.
MeasureValue EvaluateMeasure(const Transcript& transcript, MeasureKind kind,
                             std::uint64_t seed, const EvalOptions& options = {});

struct MeasureReport {
  MeasureKind measure = MeasureKind::kStep;
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;
  double std_error = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::uint64_t seed = 0;
  double min = 0.0;
  double max = 0.0;
  // Share of replicates whose value is exactly 0.
  double zero_fraction = 0.0;
  // Across replicates: mean gamma(Var_T) and mean sqrt(Var_T).
  double mean_gamma_var = 0.0;
  double mean_sqrt_var = 0.0;
  std::vector<double> values;  // per replicate, in replicate order
};

MeasureReport SummarizeReport(MeasureKind measure, std::vector<double> values,
                        std::uint64_t seed);

// Worker count for the harness: CALIB_THREADS when set to a positive
// integer, otherwise the hardware concurrency.
int HarnessThreads();

// Runs `n_reps` episodes (replicate r uses DeriveSeed(master_seed, r)) and
// evaluates every requested measure on each. Results do not depend on the
// thread count. Throws std::invalid_argument when n_reps < 2.
std::vector<MeasureReport> EstimateErrors(const NatureSpec& nature,
                                          const ForecasterSpec& forecaster,
                                          const std::vector<MeasureKind>& measures,
                                          std::size_t n_reps,
                                          std::uint64_t master_seed,
                                          const EvalOptions& options = {});

MeasureReport EstimateError(const NatureSpec& nature,
                            const ForecasterSpec& forecaster,
                            MeasureKind measure, std::size_t n_reps,
                            std::uint64_t master_seed,
                            const EvalOptions& options = {});

struct GapParams {
  std::optional<double> epsilon;  // binary_search
  std::optional<double> c;        // smoothed_hedging, epoch
};

// Nature and the paired forecasters of a named gap construction.
struct GapSetup {
  std::string experiment;
  NatureSpec nature;
  ForecasterSpec truthful;
  ForecasterSpec strategic;
  MeasureKind measure = MeasureKind::kVCal;
};

// Experiments: binary_search, hedging, smoothed_hedging, epoch. Throws
// std::invalid_argument for unknown names or parameters outside the
// construction's range.
GapSetup MakeGapSetup(const std::string& experiment, int horizon,
                      const GapParams& params = {});

struct GapReport {
  std::string experiment;
  int horizon = 0;
  MeasureReport truthful;
  MeasureReport strategic;
  double difference = 0.0;  // truthful.mean - strategic.mean
  double ratio = 0.0;       // truthful.mean / strategic.mean, inf when 0
};

// One report per measure; the setup's own measure when `measures` is empty.
std::vector<GapReport> TruthfulnessGap(const std::string& experiment,
                                       int horizon, const GapParams& params,
                                       std::vector<MeasureKind> measures,
                                       std::size_t n_reps, std::uint64_t seed,
                                       const EvalOptions& options = {});

struct ScalingReport {
  MeasureKind measure = MeasureKind::kStep;
  std::vector<int> horizons;
  std::vector<MeasureReport> reports;
  // Points with mean <= 0 are left out of the fit.
  std::vector<bool> censored;
  double slope = 0.0;  // NaN with fewer than two uncensored points
  double intercept = 0.0;
  double residual_ss = 0.0;
};

using NatureFactory = std::function<NatureSpec(int horizon)>;

// Least-squares slope of log(mean) against log(T). Needs at least three
// strictly increasing horizons.
ScalingReport ScalingFit(const NatureFactory& nature,
                         const ForecasterSpec& forecaster, MeasureKind measure,
                         const std::vector<int>& horizons, std::size_t n_reps,
                         std::uint64_t seed, const EvalOptions& options = {});

// Mean of gamma(Var_T) over the transcripts. Throws when empty.
double OptFloor(const std::vector<Transcript>& transcripts);

}  // namespace calib

#endif  // CALIB_HARNESS_H_

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
#include "calib/harness.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <span>
#include <stdexcept>
#include <thread>

#include "calib/measures.h"
#include "calib/rng.h"
#include "calib/statistics.h"

namespace calib {

namespace {

void Require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

// Stream indices under an episode seed.
constexpr std::uint64_t kNatureStream = 1;
constexpr std::uint64_t kOutcomeStream = 2;
constexpr std::uint64_t kForecasterStream = 3;
constexpr std::uint64_t kMeasureStream = 4;

template <class Real>
MeasureValue EvaluateOn(std::span<const std::uint8_t> x,
                        std::span<const Real> p, MeasureKind kind,
                        std::uint64_t seed, const EvalOptions& options) {
  switch (kind) {
    case MeasureKind::kStep:
      return StepCE(x, p);
    case MeasureKind::kStepSub: {
      SubsetSampler sampler(options.subsamples, seed);
      return StepCESub(x, p, sampler);
    }
    case MeasureKind::kVCal:
      return VCal(x, p);
    case MeasureKind::kVCalSub: {
      SubsetSampler sampler(options.subsamples, seed);
      return VCalSub(x, p, sampler);
    }
    case MeasureKind::kUCalBounds:
      return UCalBounds(x, p);
    case MeasureKind::kSign:
      return SignCE(x, p);
    case MeasureKind::kEce:
      return Ece(x, p);
    default:
      break;
  }
  throw std::invalid_argument("measure has no evaluator for this precision");
}

// Runs fn(i) for i in [0, n) on up to HarnessThreads() workers. The first
// exception thrown by any worker is rethrown.
template <class Fn>
void ParallelFor(std::size_t n, Fn fn) {
  const std::size_t workers =
      std::min<std::size_t>(n, static_cast<std::size_t>(HarnessThreads()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

double RealizedVariance(const PredictionSequence& pstar) {
  std::vector<double> terms(pstar.size());
  for (std::size_t t = 0; t < pstar.size(); ++t) {
    terms[t] = pstar[t] * (1.0 - pstar[t]);
  }
  return PairwiseSum(terms);
}

Transcript RunEpisode(const NatureSpec& nature_spec,
                      const ForecasterSpec& forecaster_spec,
                      std::uint64_t seed) {
  Require(nature_spec.horizon > 0, "horizon T must be positive");
  const int horizon = nature_spec.horizon;
  auto nature = MakeNature(nature_spec);
  auto forecaster = MakeForecaster(forecaster_spec, horizon, nature_spec.c);
  Rng nature_rng(DeriveSeed(seed, kNatureStream));
  Rng outcome_rng(DeriveSeed(seed, kOutcomeStream));
  Rng forecaster_rng(DeriveSeed(seed, kForecasterStream));

  Transcript tr;
  tr.x.reserve(horizon);
  tr.pstar.reserve(horizon);
  tr.p.reserve(horizon);
  bool precise = true;
  for (int t = 0; t < horizon; ++t) {
    const double pstar = nature->NextPStar(nature_rng);
    if (precise) {
      auto exact = nature->PendingPrecise();
      if (exact) {
        tr.pstar_precise.push_back(std::move(*exact));
      } else {
        precise = false;
        tr.pstar_precise.clear();
      }
    }
    const double p = forecaster->Predict(pstar, forecaster_rng);
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::logic_error("forecaster produced a prediction outside [0, 1]");
    }
    const std::uint8_t x = SampleOutcome(pstar, outcome_rng);
    nature->Observe(x);
    forecaster->Observe(x, p);
    tr.x.push_back(x);
    tr.pstar.push_back(pstar);
    tr.p.push_back(p);
  }
  if (precise && forecaster->IsTruthful()) tr.p_precise = tr.pstar_precise;
  tr.var_T = RealizedVariance(tr.pstar);
  return tr;
}

MeasureValue EvaluateMeasure(const Transcript& transcript, MeasureKind kind,
                             std::uint64_t seed, const EvalOptions& options) {
  const std::span<const std::uint8_t> x(transcript.x);
  switch (kind) {
    case MeasureKind::kSmooth:
      return SmoothCE(x, transcript.p);
    case MeasureKind::kSsce: {
      SubsetSampler sampler(options.subsamples, seed);
      return Ssce(x, transcript.p, sampler);
    }
    default:
      break;
  }
  if (!transcript.p_precise.empty()) {
    return EvaluateOn<Precise>(x, transcript.p_precise, kind, seed, options);
  }
  return EvaluateOn<double>(x, transcript.p, kind, seed, options);
}

MeasureReport SummarizeReport(MeasureKind measure, std::vector<double> values,
                              std::uint64_t seed) {
  const SampleSummary s = Summarize(values);
  MeasureReport r;
  r.measure = measure;
  r.n = s.n;
  r.mean = s.mean;
  r.sd = s.sd;
  r.std_error = s.std_error;
  r.ci_lo = s.mean - 1.96 * s.std_error;
  r.ci_hi = s.mean + 1.96 * s.std_error;
  r.seed = seed;
  r.min = s.min;
  r.max = s.max;
  if (!values.empty()) {
    const auto zeros = std::count(values.begin(), values.end(), 0.0);
    r.zero_fraction =
        static_cast<double>(zeros) / static_cast<double>(values.size());
  }
  r.values = std::move(values);
  return r;
}

int HarnessThreads() {
  if (const char* env = std::getenv("CALIB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) {
      return static_cast<int>(std::min<long>(v, 1024));
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::vector<MeasureReport> EstimateErrors(
    const NatureSpec& nature, const ForecasterSpec& forecaster,
    const std::vector<MeasureKind>& measures, std::size_t n_reps,
    std::uint64_t master_seed, const EvalOptions& options) {
  Require(n_reps >= 2, "n_reps must be at least 2");
  Require(!measures.empty(), "no measure requested");
  // Fail on invalid specs before spawning workers.
  MakeNature(nature);
  MakeForecaster(forecaster, nature.horizon, nature.c);

  const std::size_t m = measures.size();
  std::vector<std::vector<double>> values(m, std::vector<double>(n_reps));
  std::vector<double> gamma_var(n_reps), sqrt_var(n_reps);
  ParallelFor(n_reps, [&](std::size_t r) {
    const std::uint64_t seed = DeriveSeed(master_seed, r);
    const Transcript tr = RunEpisode(nature, forecaster, seed);
    for (std::size_t j = 0; j < m; ++j) {
      const std::uint64_t measure_seed =
          DeriveSeed(DeriveSeed(seed, kMeasureStream), j);
      values[j][r] = EvaluateMeasure(tr, measures[j], measure_seed, options).value;
    }
    gamma_var[r] = Gamma(tr.var_T);
    sqrt_var[r] = std::sqrt(tr.var_T);
  });

  const double mean_gamma = PairwiseSum(gamma_var) / static_cast<double>(n_reps);
  const double mean_sqrt = PairwiseSum(sqrt_var) / static_cast<double>(n_reps);
  std::vector<MeasureReport> reports;
  reports.reserve(m);
  for (std::size_t j = 0; j < m; ++j) {
    reports.push_back(
        SummarizeReport(measures[j], std::move(values[j]), master_seed));
    reports.back().mean_gamma_var = mean_gamma;
    reports.back().mean_sqrt_var = mean_sqrt;
  }
  return reports;
}

MeasureReport EstimateError(const NatureSpec& nature,
                            const ForecasterSpec& forecaster,
                            MeasureKind measure, std::size_t n_reps,
                            std::uint64_t master_seed,
                            const EvalOptions& options) {
  return EstimateErrors(nature, forecaster, {measure}, n_reps, master_seed,
                        options)
      .front();
}

GapSetup MakeGapSetup(const std::string& experiment, int horizon,
                      const GapParams& params) {
  Require(horizon > 0, "horizon T must be positive");
  GapSetup s;
  s.experiment = experiment;
  s.truthful = TruthfulSpec();
  if (experiment == "binary_search") {
    const double eps =
        params.epsilon.value_or(1.0 / (4.0 * std::sqrt(static_cast<double>(horizon))));
    s.nature = BinarySearchSpec(eps, horizon);
    s.strategic = ConstantForecasterSpec(0.5);
    s.measure = MeasureKind::kVCal;
  } else if (experiment == "hedging") {
    s.nature = HedgingFifthsSpec(horizon);
    s.strategic = HedgingFifthsForecasterSpec();
    s.measure = MeasureKind::kVCal;
  } else if (experiment == "smoothed_hedging") {
    s.nature = SmoothedHedgingSpec(params.c.value_or(0.1), horizon);
    s.strategic = HedgingFifthsForecasterSpec();
    s.measure = MeasureKind::kVCal;
  } else if (experiment == "epoch") {
    const double c = params.c.value_or(1.0 / 64.0);
    s.nature = EpochSpec(c, horizon);
    s.strategic = PatchingSpec(c);
    s.measure = MeasureKind::kStep;
  } else {
    throw std::invalid_argument("unknown gap experiment '" + experiment + "'");
  }
  // Surface range violations (epsilon, c, divisibility of T) here.
  MakeNature(s.nature);
  MakeForecaster(s.strategic, horizon, s.nature.c);
  return s;
}

std::vector<GapReport> TruthfulnessGap(const std::string& experiment,
                                       int horizon, const GapParams& params,
                                       std::vector<MeasureKind> measures,
                                       std::size_t n_reps, std::uint64_t seed,
                                       const EvalOptions& options) {
  const GapSetup setup = MakeGapSetup(experiment, horizon, params);
  if (measures.empty()) measures.push_back(setup.measure);
  auto truthful =
      EstimateErrors(setup.nature, setup.truthful, measures, n_reps, seed, options);
  auto strategic = EstimateErrors(setup.nature, setup.strategic, measures,
                                  n_reps, seed, options);
  std::vector<GapReport> out;
  for (std::size_t j = 0; j < measures.size(); ++j) {
    GapReport g;
    g.experiment = experiment;
    g.horizon = horizon;
    g.truthful = std::move(truthful[j]);
    g.strategic = std::move(strategic[j]);
    g.difference = g.truthful.mean - g.strategic.mean;
    g.ratio = g.strategic.mean > 0.0
                  ? g.truthful.mean / g.strategic.mean
                  : std::numeric_limits<double>::infinity();
    out.push_back(std::move(g));
  }
  return out;
}

ScalingReport ScalingFit(const NatureFactory& nature,
                         const ForecasterSpec& forecaster, MeasureKind measure,
                         const std::vector<int>& horizons, std::size_t n_reps,
                         std::uint64_t seed, const EvalOptions& options) {
  Require(horizons.size() >= 3, "scaling fit needs at least 3 horizons");
  for (std::size_t i = 1; i < horizons.size(); ++i) {
    Require(horizons[i] > horizons[i - 1],
            "scaling horizons must be strictly increasing");
  }
  ScalingReport rep;
  rep.measure = measure;
  rep.horizons = horizons;
  std::vector<double> lx, ly;
  for (int horizon : horizons) {
    rep.reports.push_back(
        EstimateError(nature(horizon), forecaster, measure, n_reps, seed, options));
    const bool censored = !(rep.reports.back().mean > 0.0);
    rep.censored.push_back(censored);
    if (!censored) {
      lx.push_back(std::log(static_cast<double>(horizon)));
      ly.push_back(std::log(rep.reports.back().mean));
    }
  }
  if (lx.size() >= 2) {
    const LineFit fit = FitLine(lx, ly);
    rep.slope = fit.slope;
    rep.intercept = fit.intercept;
    rep.residual_ss = fit.residual_ss;
  } else {
    rep.slope = std::numeric_limits<double>::quiet_NaN();
    rep.intercept = std::numeric_limits<double>::quiet_NaN();
  }
  return rep;
}

double OptFloor(const std::vector<Transcript>& transcripts) {
  Require(!transcripts.empty(), "opt floor needs at least one transcript");
  std::vector<double> g(transcripts.size());
  for (std::size_t i = 0; i < transcripts.size(); ++i) {
    g[i] = Gamma(transcripts[i].var_T);
  }
  return PairwiseSum(g) / static_cast<double>(g.size());
}

}  // namespace calib

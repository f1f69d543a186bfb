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
// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// a summary. The exit status is nonzero only when a check could not run.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "calib/environments.h"
#include "calib/forecasters.h"
#include "calib/harness.h"
#include "calib/measures.h"
#include "calib/oracle.h"
#include "calib/rng.h"
#include "calib/statistics.h"
#include "cli.h"

namespace calib {
namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Detail {
 public:
  template <class... Args>
  void Add(const char* fmt, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof(buf), fmt, args...);
    if (!text_.empty()) text_ += "; ";
    text_ += buf;
  }
  const std::string& str() const { return text_; }

 private:
  std::string text_;
};

double Seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

const OracleBatteryConfig kBattery = {1000, 12, 20260101, 1e-3, 0.005};

Outcome OracleEquivalence() {
  const auto start = std::chrono::steady_clock::now();
  const auto reports = RunOracleBattery(kBattery);
  const double secs = Seconds(start);
  Outcome o;
  std::size_t bad = 0, above = 0;
  double worst[16] = {};
  for (const auto& r : reports) {
    if (r.abs_diff > r.tolerance) ++bad;
    // Grid oracles restrict the supremum, so they never exceed it.
    if (r.oracle > r.optimized + 1e-9) ++above;
    auto& w = worst[static_cast<int>(r.measure)];
    w = std::max(w, r.abs_diff);
  }
  Detail d;
  d.Add("%zu comparisons, %zu over tolerance, %zu oracle above optimum",
        reports.size(), bad, above);
  for (MeasureKind m : {MeasureKind::kStep, MeasureKind::kSign,
                        MeasureKind::kVCal, MeasureKind::kStepSub,
                        MeasureKind::kSsce, MeasureKind::kSmooth}) {
    d.Add("max|diff| %s=%.3g", std::string(MeasureName(m)).c_str(),
          worst[static_cast<int>(m)]);
  }
  d.Add("%.1fs (limit 120s)", secs);
  o.pass = bad == 0 && above == 0 && secs <= 120.0;
  o.detail = d.str();
  return o;
}

Outcome Sandwich() {
  std::size_t violations = 0;
  const double tol = 1e-9;
  for (std::size_t i = 0; i < kBattery.instances; ++i) {
    const Instance in = BatteryInstance(kBattery, i);
    const double step = StepCE(in.x, in.p).value;
    const double sub = StepCESubExact(in.x, in.p).value;
    const double sign = SignCE(in.x, in.p).value;
    const double vcal = VCal(in.x, in.p).value;
    const double ece = Ece(in.x, in.p).value;
    const MeasureValue ucal = UCalBounds(in.x, in.p);
    violations += 0.5 * step > sub + tol;
    violations += sign / 3.0 > step + tol;
    violations += step > sign + tol;
    violations += step + tol < vcal / 8.0;
    violations += step > ece + tol;
    violations += vcal > ucal.upper + tol;
  }
  Outcome o;
  o.pass = violations == 0;
  Detail d;
  d.Add("%zu instances x 6 inequalities, %zu violations", kBattery.instances,
        violations);
  o.detail = d.str();
  return o;
}

Outcome Axioms() {
  Outcome o;
  Detail d;
  // CM(x, x) = 0 for every measure.
  std::size_t nonzero = 0, checked = 0;
  for (std::uint64_t i = 0; i < 200; ++i) {
    Rng rng(DeriveSeed(77, i));
    const std::size_t horizon = 1 + rng.NextU64() % 60;
    EventSequence x(horizon);
    PredictionSequence p(horizon);
    for (std::size_t t = 0; t < horizon; ++t) {
      x[t] = rng.Bernoulli(0.5);
      p[t] = x[t];
    }
    SubsetSampler s1(50, i), s2(50, i), s3(50, i);
    const MeasureValue ucal = UCalBounds(x, p);
    const double values[] = {StepCE(x, p).value,     StepCESub(x, p, s1).value,
                             VCal(x, p).value,       VCalSub(x, p, s2).value,
                             ucal.lower,             ucal.upper,
                             SignCE(x, p).value,     Ece(x, p).value,
                             SmoothCE(x, p).value,   Ssce(x, p, s3).value};
    for (double v : values) {
      ++checked;
      nonzero += v != 0.0;
    }
  }
  d.Add("CM(x,x): %zu of %zu nonzero", nonzero, checked);
  o.pass = nonzero == 0;

  const int horizon = 400;
  const auto complete = EstimateError(ConstantSpec(0.3, horizon),
                                      TruthfulSpec(), MeasureKind::kStep, 500, 31);
  const double complete_limit = 2.0 * std::sqrt(horizon);
  d.Add("truthful Bern(0.3) stepCE mean %.2f (<= %.1f)", complete.mean,
        complete_limit);
  o.pass = o.pass && complete.mean <= complete_limit;

  const auto sound =
      EstimateError(ConstantSpec(0.3, horizon), ConstantForecasterSpec(0.6),
                    MeasureKind::kStep, 500, 32);
  d.Add("beta=0.6 on Bern(0.3) stepCE mean %.2f (>= %.1f)", sound.mean,
        0.2 * horizon);
  o.pass = o.pass && sound.mean >= 0.2 * horizon;
  o.detail = d.str();
  return o;
}

Outcome BinarySearchGap() {
  const auto start = std::chrono::steady_clock::now();
  const int horizon = 1000;
  const auto g =
      TruthfulnessGap("binary_search", horizon, {}, {MeasureKind::kVCal}, 200, 41)
          .front();
  const double secs = Seconds(start);
  std::size_t below = 0;
  for (double v : g.truthful.values) below += v < horizon / 4.0;
  const double limit = 4.0 * std::sqrt(horizon);
  Outcome o;
  o.pass = below == 0 && g.strategic.mean <= limit && secs <= 60.0;
  Detail d;
  d.Add("truthful vcal min %.2f mean %.2f, %zu of 200 below 250",
        g.truthful.min, g.truthful.mean, below);
  d.Add("constant-1/2 vcal mean %.2f (<= %.2f)", g.strategic.mean, limit);
  d.Add("%.1fs (limit 60s)", secs);
  o.detail = d.str();
  return o;
}

Outcome HedgingGap() {
  const int horizon = 1000;
  EvalOptions eval;
  eval.subsamples = 200;
  const auto gaps = TruthfulnessGap(
      "hedging", horizon, {}, {MeasureKind::kVCal, MeasureKind::kVCalSub}, 500,
      51, eval);
  const auto& vcal = gaps[0];
  const auto& sub = gaps[1];
  const double limit = 0.3 * std::sqrt(horizon);
  Outcome o;
  o.pass = vcal.truthful.mean >= limit && vcal.strategic.zero_fraction >= 0.99 &&
           sub.strategic.mean <= 0.05;
  Detail d;
  d.Add("truthful vcal mean %.3f (>= %.3f)", vcal.truthful.mean, limit);
  d.Add("hedging vcal zero on %.1f%% (>= 99%%)",
        100.0 * vcal.strategic.zero_fraction);
  d.Add("hedging vcal_sub mean %.4f (<= 0.05)", sub.strategic.mean);
  o.detail = d.str();
  return o;
}

Outcome SmoothedHedgingTrend() {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<int> horizons = {1000, 10000, 100000};
  std::vector<double> lx, ly;
  bool strategic_ok = true;
  Detail d;
  for (int horizon : horizons) {
    const auto g = TruthfulnessGap("smoothed_hedging", horizon, {std::nullopt, 0.1},
                                   {MeasureKind::kVCal}, 200, 61)
                       .front();
    lx.push_back(std::log(horizon));
    ly.push_back(std::log(g.truthful.mean));
    strategic_ok = strategic_ok && g.strategic.mean <= 0.05;
    d.Add("T=%d truthful %.3f strategic %.4f", horizon, g.truthful.mean,
          g.strategic.mean);
  }
  const double slope = FitLine(lx, ly).slope;
  const double secs = Seconds(start);
  d.Add("slope %.3f (in [0.23, 0.43])", slope);
  d.Add("%.1fs (limit 600s)", secs);
  Outcome o;
  o.pass = slope >= 0.23 && slope <= 0.43 && strategic_ok && secs <= 600.0;
  o.detail = d.str();
  return o;
}

// Multiple of 75 (5k for k = 1, 3, 5) and of 10, nearest to 15 * 2^10.
constexpr int kEpochHorizon = 15300;

Outcome EpochGap() {
  const int horizon = kEpochHorizon;
  Outcome o;
  Detail d;
  double previous = -std::numeric_limits<double>::infinity();
  bool increasing = true, truthful_ok = true, patching_ok = true;
  for (int e : {4, 6, 8}) {
    const double c = std::ldexp(1.0, -e);
    GapParams params;
    params.c = c;
    const auto g =
        TruthfulnessGap("epoch", horizon, params, {MeasureKind::kStep}, 200, 71)
            .front();
    const int k = EpochCount(c);
    const double lower = 0.2 * std::sqrt(horizon * static_cast<double>(k));
    const double upper = 5.0 * (std::sqrt(c * horizon) + 1.0);
    increasing = increasing && g.truthful.mean > previous;
    previous = g.truthful.mean;
    truthful_ok = truthful_ok && g.truthful.mean >= lower;
    patching_ok = patching_ok && g.strategic.mean <= upper;
    d.Add("c=2^-%d truthful %.2f+-%.2f (>= %.2f) patching %.2f (<= %.2f)", e,
          g.truthful.mean, g.truthful.std_error, lower, g.strategic.mean, upper);
  }
  d.Add("truthful increasing: %s", increasing ? "yes" : "no");
  o.pass = increasing && truthful_ok && patching_ok;
  o.detail = d.str();
  return o;
}

Outcome HedgeRate() {
  const std::vector<int> horizons = {256, 1024, 4096};
  const std::vector<std::pair<const char*, NatureFactory>> natures = {
      {"binary_search",
       [](int h) { return BinarySearchSpec(1.0 / (4.0 * std::sqrt(h)), h); }},
      {"bernoulli", [](int h) { return ConstantSpec(0.5, h); }}};
  Outcome o;
  Detail d;
  for (const auto& [name, factory] : natures) {
    const auto rep = ScalingFit(factory, HedgeStepSpec(0), MeasureKind::kStep,
                                horizons, 100, 81);
    bool under = true;
    for (std::size_t i = 0; i < horizons.size(); ++i) {
      const double h = horizons[i];
      const double limit = 3.0 * std::sqrt(h * std::log(h));
      under = under && rep.reports[i].mean <= limit;
      d.Add("%s T=%d mean %.2f (<= %.1f)", name, horizons[i],
            rep.reports[i].mean, limit);
    }
    d.Add("%s slope %.3f (<= 0.62)", name, rep.slope);
    o.pass = o.pass && under && rep.slope <= 0.62;
  }
  o.detail = d.str();
  return o;
}

NatureSpec RandomProduct(int horizon, std::uint64_t seed,
                         const std::function<double(Rng&)>& draw) {
  Rng rng(seed);
  std::vector<double> p(horizon);
  for (double& v : p) v = draw(rng);
  return ProductSpec(std::move(p));
}

Outcome Truthfulness() {
  Outcome o;
  Detail d;
  EvalOptions eval;
  eval.subsamples = 100;

  // Product natures.
  const int horizon = 2000;
  const std::vector<std::pair<const char*, NatureSpec>> products = {
      {"uniform", RandomProduct(horizon, 1, [](Rng& r) { return r.Uniform01(); })},
      {"skewed", RandomProduct(horizon, 2,
                               [](Rng& r) { return std::pow(r.Uniform01(), 4); })},
      {"bimodal", RandomProduct(horizon, 3,
                                [](Rng& r) {
                                  return r.Bernoulli(0.5) ? r.Uniform(0.0, 0.1)
                                                          : r.Uniform(0.9, 1.0);
                                })},
      {"half", ConstantSpec(0.5, horizon)},
      {"hedging_fifths", HedgingFifthsSpec(horizon)},
      {"rare", ConstantSpec(0.002, horizon)}};
  double worst_ratio = 0.0;
  for (const auto& [name, spec] : products) {
    const auto r = EstimateError(spec, TruthfulSpec(), MeasureKind::kStepSub,
                                 100, 91, eval);
    const double ratio = r.mean / r.mean_gamma_var;
    worst_ratio = std::max(worst_ratio, ratio);
    d.Add("%s %.2f/%.2f=%.3f", name, r.mean, r.mean_gamma_var, ratio);
  }
  d.Add("max product ratio %.3f (<= 10)", worst_ratio);
  o.pass = worst_ratio <= 10.0;

  // c-smoothed natures at T = 10^4.
  std::vector<double> sx, sy;
  for (int e = 2; e <= 10; ++e) {
    const double c = std::ldexp(1.0, -e);
    const auto r = EstimateError(SmoothedUniformSpec(c, 10000), TruthfulSpec(),
                                 MeasureKind::kStepSub, 100, 92, eval);
    sx.push_back(std::sqrt(std::log(1.0 / c)));
    sy.push_back(r.mean / r.mean_sqrt_var);
  }
  const LineFit fit = FitLine(sx, sy);
  const double margin = std::max(0.0, fit.max_residual);
  const double env_intercept = fit.intercept + margin;
  bool below = true;
  for (std::size_t i = 0; i < sx.size(); ++i) {
    below = below && sy[i] <= env_intercept + fit.slope * sx[i] + 1e-12;
  }
  d.Add("smoothed ratios %.3f..%.3f; envelope %.3f + %.3f*sqrt(ln(1/c)) (both <= 10)",
        *std::min_element(sy.begin(), sy.end()),
        *std::max_element(sy.begin(), sy.end()), env_intercept, fit.slope);
  o.pass = o.pass && below && env_intercept <= 10.0 && fit.slope <= 10.0;
  o.detail = d.str();
  return o;
}

std::string RunCli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::Run(args, out, err);
  if (code != 0) {
    throw std::runtime_error("cli exited " + std::to_string(code) + ": " +
                             err.str());
  }
  return out.str();
}

Outcome Determinism() {
  const auto dir = std::filesystem::temp_directory_path() / "calib_acceptance";
  std::filesystem::create_directories(dir);
  const std::vector<std::pair<std::string, std::string>> configs = {
      {"binary_search",
       R"({"experiment":"binary_search","T":500,"reps":24,"seed":5,"measure":"vcal"})"},
      {"hedging",
       R"({"experiment":"hedging","T":400,"reps":24,"seed":5,"measure":"vcal,vcal_sub","params":{"subsamples":20}})"},
      {"smoothed_hedging",
       R"({"experiment":"smoothed_hedging","T":[1000,2000],"reps":24,"seed":5,"measure":"vcal"})"},
      {"epoch",
       R"({"experiment":"epoch","T":1500,"reps":24,"seed":5,"measure":"step,step_sub","params":{"c":0.015625,"subsamples":10}})"},
      {"thm_alg_scaling",
       R"({"experiment":"thm_alg_scaling","T":[64,128,256],"reps":12,"seed":5,"measure":"step"})"},
      {"scaling",
       R"({"experiment":"scaling","T":[100,200,400],"reps":24,"seed":5,"measure":"step,smce,ssce","params":{"nature":{"kind":"smoothed_uniform","c":0.25},"subsamples":10}})"},
      {"estimate",
       R"({"experiment":"estimate","T":300,"reps":24,"seed":5,"measure":"ece,sign,ucal","params":{"nature":{"kind":"product","pstar":"hedging_fifths"},"forecaster":{"kind":"hedging_fifths"}}})"}};
  const char* saved = std::getenv("CALIB_THREADS");
  const std::string restore = saved ? saved : "";
  std::size_t differing = 0;
  for (const auto& [name, text] : configs) {
    const auto path = (dir / (name + ".json")).string();
    std::ofstream(path) << text;
    std::string first;
    for (const char* threads : {"1", "3", "8"}) {
      setenv("CALIB_THREADS", threads, 1);
      const std::string out = RunCli({"experiment", "--config", path});
      if (first.empty()) {
        first = out;
      } else if (out != first) {
        ++differing;
      }
    }
  }
  if (saved) {
    setenv("CALIB_THREADS", restore.c_str(), 1);
  } else {
    unsetenv("CALIB_THREADS");
  }
  Outcome o;
  o.pass = differing == 0;
  Detail d;
  d.Add("%zu experiments x CALIB_THREADS {1,3,8}, %zu differing outputs",
        configs.size(), differing);
  o.detail = d.str();
  return o;
}

}  // namespace
}  // namespace calib

int main() {
  using calib::Outcome;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"AC1 oracle equivalence", calib::OracleEquivalence},
      {"AC2 sandwich inequalities", calib::Sandwich},
      {"AC3 completeness and soundness", calib::Axioms},
      {"AC4 binary-search gap", calib::BinarySearchGap},
      {"AC5 hedging gap", calib::HedgingGap},
      {"AC6 smoothed hedging trend", calib::SmoothedHedgingTrend},
      {"AC7 epoch gap", calib::EpochGap},
      {"AC8 hedge stepCE rate", calib::HedgeRate},
      {"AC9 truthfulness surrogates", calib::Truthfulness},
      {"AC10 determinism", calib::Determinism},
  };
  int passed = 0, errors = 0;
  for (const auto& [name, run] : criteria) {
    try {
      const Outcome o = run();
      passed += o.pass;
      std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    } catch (const std::exception& e) {
      ++errors;
      std::printf("FAIL %s: error: %s\n", name, e.what());
    }
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", passed, criteria.size());
  return errors == 0 ? 0 : 1;
}

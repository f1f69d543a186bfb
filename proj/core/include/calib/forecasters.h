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
#ifndef CALIB_FORECASTERS_H_
#define CALIB_FORECASTERS_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "calib/rng.h"

namespace calib {

enum class ForecasterKind {
  kTruthful,
  kConstant,
  kHedgingFifths,
  kPatching,
  kHedgeStep,
};

std::string_view ForecasterKindName(ForecasterKind kind);

struct ForecasterSpec {
  ForecasterKind kind = ForecasterKind::kTruthful;
  std::optional<double> level;  // constant
  // Hedge bucket count. 0 means "use the horizon", i.e. k = T.
  std::optional<int> k;
  std::optional<double> eta;
  // Patching forecaster smoothness; taken from the nature when absent.
  std::optional<double> c;
};

ForecasterSpec TruthfulSpec();
ForecasterSpec ConstantForecasterSpec(double level);
ForecasterSpec HedgingFifthsForecasterSpec();
ForecasterSpec PatchingSpec(std::optional<double> c = std::nullopt);
ForecasterSpec HedgeStepSpec(int k = 0, std::optional<double> eta = {});

class Forecaster {
 public:
  virtual ~Forecaster() = default;

  // Prediction for the next step given the revealed p*_t.
  virtual double Predict(double pstar, Rng& rng) = 0;
  // Realized outcome for the step just predicted.
  virtual void Observe(std::uint8_t /*x*/, double /*p*/) {}
  // True when the prediction is always p*_t itself.
  virtual bool IsTruthful() const { return false; }
};

// `nature_c` fills in the patching forecaster's c when `spec.c` is unset.
// Throws std::invalid_argument for invalid parameters.
std::unique_ptr<Forecaster> MakeForecaster(
    const ForecasterSpec& spec, int horizon,
    std::optional<double> nature_c = std::nullopt);

double TruthfulPrediction(double pstar);
double ConstantPrediction(double level);
// 2/5 for t <= T/2, 3/5 afterwards (t is 1-based). T must be even.
double HedgingFifthsPrediction(int t, int horizon);

// Strategic forecaster against the epoch nature: predicts 1/2 for T/5 steps,
// then steers the bias accumulated at 1/2 back to zero while predicting c/2
// and 1 - c/2 elsewhere.
class PatchingForecaster final : public Forecaster {
 public:
  // Throws unless T is a positive multiple of 10 and c in (0, 1].
  PatchingForecaster(double c, int horizon);

  double Predict(double pstar, Rng& rng) override;
  void Observe(std::uint8_t x, double p) override;

  // Running sum of x - 1/2 over every step predicted at 1/2.
  double bias_at_half() const { return bias_; }

 private:
  double low_;
  double high_;
  long horizon_;
  long t_ = 0;  // steps observed
  double bias_ = 0.0;
  bool patching_ = true;  // still predicting 1/2 in the patch block
  bool deficit_ = false;  // Delta < 0
};

// Hedge over the 2k signed threshold experts (sigma, i), sigma in {+1, -1},
// i in [k]; expert (sigma, i) scores sigma * 1{p <= (i-1)/(k-1)} * (x - p).
struct HedgeState {
  int k = 0;
  int horizon = 0;
  double eta = 0.0;
  int steps = 0;
  // weights[i] for sigma = +1 and weights[k + i] for sigma = -1 (0-based i).
  std::vector<double> weights;
  std::vector<double> cumulative_cost;
};

inline constexpr double kHedgeTolerance = 1e-12;

// Uniform weights and eta = sqrt(8 ln(2k) / T) unless overridden.
HedgeState HedgeInit(int k, int horizon, std::optional<double> eta = {});

// Grid level (j-1)/(k-1) for 1-based j, computed identically everywhere.
double HedgeLevel(int k, int j);

struct HedgeDecision {
  enum class Branch { kAllNonNegative, kAllNonPositive, kMixed };
  Branch branch = Branch::kAllNonNegative;
  // C_j for j = 1..k, stored 0-based.
  std::vector<double> c;
  // Support: level j_low with probability q, j_low + 1 with 1 - q (1-based).
  // For the pure branches both equal the predicted level's index and q = 1.
  int j_low = 1;
  double q = 1.0;
};

HedgeDecision HedgeDecide(const HedgeState& state);
// Samples a prediction from HedgeDecide's two-point distribution.
double HedgePredict(const HedgeState& state, Rng& rng);
// Multiplicative update with cost (1 - sigma 1{p <= (i-1)/(k-1)} (x - p)) / 2.
// Throws std::invalid_argument when p is not one of the k grid levels.
void HedgeUpdate(HedgeState& state, std::uint8_t x, double p);

}  // namespace calib

#endif  // CALIB_FORECASTERS_H_

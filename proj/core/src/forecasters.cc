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

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace calib {

namespace {

void Require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

class TruthfulForecaster final : public Forecaster {
 public:
  double Predict(double pstar, Rng&) override {
    return TruthfulPrediction(pstar);
  }
  bool IsTruthful() const override { return true; }
};

class ConstantForecaster final : public Forecaster {
 public:
  explicit ConstantForecaster(double level) : level_(level) {}
  double Predict(double, Rng&) override { return level_; }

 private:
  double level_;
};

class HedgingFifthsForecaster final : public Forecaster {
 public:
  explicit HedgingFifthsForecaster(int horizon) : horizon_(horizon) {
    Require(horizon % 2 == 0, "hedging_fifths forecaster needs an even T");
  }
  double Predict(double, Rng&) override {
    return HedgingFifthsPrediction(t_ + 1, horizon_);
  }
  void Observe(std::uint8_t, double) override { ++t_; }

 private:
  int horizon_;
  int t_ = 0;
};

class HedgeForecaster final : public Forecaster {
 public:
  HedgeForecaster(int k, int horizon, std::optional<double> eta)
      : state_(HedgeInit(k, horizon, eta)) {}
  double Predict(double, Rng& rng) override {
    return HedgePredict(state_, rng);
  }
  void Observe(std::uint8_t x, double p) override {
    HedgeUpdate(state_, x, p);
  }

 private:
  HedgeState state_;
};

}  // namespace

std::string_view ForecasterKindName(ForecasterKind kind) {
  switch (kind) {
    case ForecasterKind::kTruthful:
      return "truthful";
    case ForecasterKind::kConstant:
      return "constant";
    case ForecasterKind::kHedgingFifths:
      return "hedging_fifths";
    case ForecasterKind::kPatching:
      return "patching";
    case ForecasterKind::kHedgeStep:
      return "hedge_step";
  }
  return "unknown";
}

ForecasterSpec TruthfulSpec() { return {}; }

ForecasterSpec ConstantForecasterSpec(double level) {
  ForecasterSpec s;
  s.kind = ForecasterKind::kConstant;
  s.level = level;
  return s;
}

ForecasterSpec HedgingFifthsForecasterSpec() {
  ForecasterSpec s;
  s.kind = ForecasterKind::kHedgingFifths;
  return s;
}

ForecasterSpec PatchingSpec(std::optional<double> c) {
  ForecasterSpec s;
  s.kind = ForecasterKind::kPatching;
  s.c = c;
  return s;
}

ForecasterSpec HedgeStepSpec(int k, std::optional<double> eta) {
  ForecasterSpec s;
  s.kind = ForecasterKind::kHedgeStep;
  s.k = k;
  s.eta = eta;
  return s;
}

std::unique_ptr<Forecaster> MakeForecaster(const ForecasterSpec& spec,
                                           int horizon,
                                           std::optional<double> nature_c) {
  switch (spec.kind) {
    case ForecasterKind::kTruthful:
      return std::make_unique<TruthfulForecaster>();
    case ForecasterKind::kConstant: {
      Require(spec.level.has_value(), "constant forecaster needs 'level'");
      const double level = *spec.level;
      Require(level >= 0.0 && level <= 1.0,
              "constant forecaster level must lie in [0, 1]");
      return std::make_unique<ConstantForecaster>(level);
    }
    case ForecasterKind::kHedgingFifths:
      return std::make_unique<HedgingFifthsForecaster>(horizon);
    case ForecasterKind::kPatching: {
      const auto c = spec.c ? spec.c : nature_c;
      Require(c.has_value(), "patching forecaster needs 'c'");
      return std::make_unique<PatchingForecaster>(*c, horizon);
    }
    case ForecasterKind::kHedgeStep: {
      int k = spec.k.value_or(0);
      if (k == 0) k = horizon;
      return std::make_unique<HedgeForecaster>(k, horizon, spec.eta);
    }
  }
  throw std::invalid_argument("unknown forecaster kind");
}

double TruthfulPrediction(double pstar) { return pstar; }

double ConstantPrediction(double level) {
  Require(level >= 0.0 && level <= 1.0, "level must lie in [0, 1]");
  return level;
}

double HedgingFifthsPrediction(int t, int horizon) {
  Require(horizon % 2 == 0, "hedging_fifths needs an even T");
  Require(t >= 1 && t <= horizon, "t must lie in [1, T]");
  return 2 * t <= horizon ? 0.4 : 0.6;
}

// ---------------------------------------------------------------------------
// PatchingForecaster

PatchingForecaster::PatchingForecaster(double c, int horizon)
    : low_(c / 2), high_(1.0 - c / 2), horizon_(horizon) {
  Require(c > 0.0 && c <= 1.0, "patching forecaster needs c in (0, 1]");
  Require(horizon > 0 && horizon % 10 == 0,
          "patching forecaster needs T to be a positive multiple of 10");
}

double PatchingForecaster::Predict(double, Rng&) {
  const long t = t_ + 1;
  if (5 * t <= horizon_) return 0.5;
  if (5 * t <= 3 * horizon_) {
    if (deficit_) return low_;
    // Surplus: keep predicting 1/2 (where x is mostly 0) until the bias at
    // 1/2 is used up.
    if (patching_ && bias_ > 0.0) return 0.5;
    patching_ = false;
    return low_;
  }
  if (!deficit_) return high_;
  if (patching_ && bias_ < 0.0) return 0.5;
  patching_ = false;
  return high_;
}

void PatchingForecaster::Observe(std::uint8_t x, double p) {
  ++t_;
  if (p == 0.5) bias_ += static_cast<double>(x) - 0.5;
  if (5 * t_ == horizon_) deficit_ = bias_ < 0.0;
}

// ---------------------------------------------------------------------------
// Hedge

HedgeState HedgeInit(int k, int horizon, std::optional<double> eta) {
  Require(k >= 2, "hedge forecaster needs k >= 2");
  Require(horizon >= 1, "hedge forecaster needs T >= 1");
  HedgeState s;
  s.k = k;
  s.horizon = horizon;
  s.eta = eta ? *eta : std::sqrt(8.0 * std::log(2.0 * k) / horizon);
  Require(s.eta > 0.0, "learning rate must be positive");
  s.weights.assign(2 * static_cast<std::size_t>(k), 0.5 / k);
  s.cumulative_cost.assign(2 * static_cast<std::size_t>(k), 0.0);
  return s;
}

double HedgeLevel(int k, int j) {
  return static_cast<double>(j - 1) / static_cast<double>(k - 1);
}

HedgeDecision HedgeDecide(const HedgeState& state) {
  const int k = state.k;
  HedgeDecision d;
  d.c.assign(static_cast<std::size_t>(k), 0.0);
  double suffix = 0.0;
  for (int i = k - 1; i >= 0; --i) {
    suffix += state.weights[i] - state.weights[k + i];
    d.c[i] = suffix;
  }
  const bool all_nonneg = std::all_of(d.c.begin(), d.c.end(), [](double v) {
    return v >= -kHedgeTolerance;
  });
  if (all_nonneg) {
    d.branch = HedgeDecision::Branch::kAllNonNegative;
    d.j_low = k;
    return d;
  }
  const bool all_nonpos = std::all_of(d.c.begin(), d.c.end(), [](double v) {
    return v <= kHedgeTolerance;
  });
  if (all_nonpos) {
    d.branch = HedgeDecision::Branch::kAllNonPositive;
    d.j_low = 1;
    return d;
  }
  d.branch = HedgeDecision::Branch::kMixed;
  for (int j = 0; j + 1 < k; ++j) {
    const double a = d.c[j], b = d.c[j + 1];
    if (a * b > 0.0) continue;
    d.j_low = j + 1;
    if (std::abs(a) <= kHedgeTolerance && std::abs(b) <= kHedgeTolerance) {
      d.q = 1.0;
    } else {
      d.q = std::clamp(b / (b - a), 0.0, 1.0);
    }
    return d;
  }
  // A sign change always exists in the mixed branch.
  throw std::logic_error("hedge: no sign change found");
}

double HedgePredict(const HedgeState& state, Rng& rng) {
  const HedgeDecision d = HedgeDecide(state);
  if (d.branch != HedgeDecision::Branch::kMixed) {
    return HedgeLevel(state.k, d.j_low);
  }
  const bool lower = rng.Uniform01() < d.q;
  return HedgeLevel(state.k, lower ? d.j_low : d.j_low + 1);
}

void HedgeUpdate(HedgeState& state, std::uint8_t x, double p) {
  const int k = state.k;
  Require(x <= 1, "outcome must be 0 or 1");
  const long j = std::lround(p * (k - 1));
  Require(j >= 0 && j < k && HedgeLevel(k, static_cast<int>(j) + 1) == p,
          "prediction " + std::to_string(p) + " is not on the k = " +
              std::to_string(k) + " grid");
  const double r = static_cast<double>(x) - p;
  const double cost_flat = 0.5;
  const double cost_plus = (1.0 - r) / 2;
  const double cost_minus = (1.0 + r) / 2;
  const double f_flat = std::exp(-state.eta * cost_flat);
  const double f_plus = std::exp(-state.eta * cost_plus);
  const double f_minus = std::exp(-state.eta * cost_minus);

  auto& w = state.weights;
  auto& cum = state.cumulative_cost;
  for (int i = 0; i < k; ++i) {
    // Expert i is active when p <= (i-1)/(k-1) in 1-based terms, i.e. i >= j.
    if (i >= j) {
      w[i] *= f_plus;
      w[k + i] *= f_minus;
      cum[i] += cost_plus;
      cum[k + i] += cost_minus;
    } else {
      w[i] *= f_flat;
      w[k + i] *= f_flat;
      cum[i] += cost_flat;
      cum[k + i] += cost_flat;
    }
  }
  double total = 0.0;
  for (double v : w) total += v;
  for (double& v : w) v /= total;
  ++state.steps;
}

}  // namespace calib

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
#include "calib/environments.h"

#include <algorithm>
#include <cmath>
#include <string>

namespace calib {

namespace {

double Clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

void Require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

class ProductNature final : public Nature {
 public:
  explicit ProductNature(std::vector<double> pstar)
      : Nature(static_cast<int>(pstar.size())), pstar_(std::move(pstar)) {}

 protected:
  double Draw(Rng&) override { return pstar_[elapsed()]; }

 private:
  std::vector<double> pstar_;
};

class BinarySearchNature final : public Nature {
 public:
  BinarySearchNature(double epsilon, int horizon)
      : Nature(horizon),
        epsilon_(epsilon),
        precise_enabled_(horizon <= kMaxPreciseHorizon),
        precise_(0.5),
        value_(0.5) {}

  std::optional<Precise> PendingPrecise() const override {
    if (!precise_enabled_) return std::nullopt;
    return precise_;
  }
  std::optional<double> AlphaStar() const override {
    if (elapsed() < horizon()) return std::nullopt;
    return value_;
  }
  std::optional<Precise> AlphaStarPrecise() const override {
    if (!precise_enabled_ || elapsed() < horizon()) return std::nullopt;
    return precise_;
  }

 protected:
  double Draw(Rng&) override { return value_; }

  void Update(std::uint8_t x) override {
    const int t = elapsed();
    if (precise_enabled_) {
      const Precise step = ldexp(Precise(epsilon_), -t);
      precise_ += x ? step : -step;
      value_ = static_cast<double>(precise_);
    } else {
      const double step = std::ldexp(epsilon_, -t);
      value_ += x ? step : -step;
    }
  }

 private:
  double epsilon_;
  bool precise_enabled_;
  Precise precise_;
  double value_;
};

class SmoothedHedgingNature final : public Nature {
 public:
  SmoothedHedgingNature(double c, int horizon) : Nature(horizon), c_(c) {}

 protected:
  double Draw(Rng& rng) override {
    const double center = 2 * (elapsed() + 1) <= horizon() ? 0.2 : 0.8;
    return Clamp01(rng.Uniform(center - c_, center + c_));
  }

 private:
  double c_;
};

class EpochNature final : public Nature {
 public:
  EpochNature(double c, int horizon)
      : Nature(horizon),
        c_(c),
        epochs_(EpochCount(c)),
        epoch_length_(horizon / (5 * epochs_)),
        center_(0.5) {}

  std::optional<double> AlphaStar() const override { return alpha_star_; }

 protected:
  double Draw(Rng& rng) override {
    const long t = elapsed() + 1;
    const long T = horizon();
    if (5 * t <= T) {
      return Clamp01(rng.Uniform(center_ - c_ / 2, center_ + c_ / 2));
    }
    if (5 * t <= 3 * T) return rng.Uniform(0.0, c_);
    return Clamp01(rng.Uniform(1.0 - c_, 1.0));
  }

  void Update(std::uint8_t x) override {
    const int t = elapsed();
    if (5L * t > horizon()) return;
    ones_ += x;
    if (t % epoch_length_ != 0) return;
    const int epoch = t / epoch_length_;
    const double mean = static_cast<double>(ones_) / epoch_length_;
    const double shift = std::ldexp(1.0, -(epoch + 3));
    center_ += mean >= center_ ? shift : -shift;
    ones_ = 0;
    if (epoch == epochs_) alpha_star_ = center_;
  }

 private:
  double c_;
  int epochs_;
  int epoch_length_;
  double center_;
  long ones_ = 0;
  std::optional<double> alpha_star_;
};

class SmoothedUniformNature final : public Nature {
 public:
  SmoothedUniformNature(double c, double center, int horizon)
      : Nature(horizon), lo_(center - c / 2), hi_(center + c / 2) {}

 protected:
  double Draw(Rng& rng) override { return Clamp01(rng.Uniform(lo_, hi_)); }

 private:
  double lo_;
  double hi_;
};

}  // namespace

std::string_view NatureKindName(NatureKind kind) {
  switch (kind) {
    case NatureKind::kProduct:
      return "product";
    case NatureKind::kBinarySearch:
      return "binary_search";
    case NatureKind::kSmoothedHedging:
      return "smoothed_hedging";
    case NatureKind::kEpochBinarySearch:
      return "epoch";
    case NatureKind::kSmoothedUniform:
      return "smoothed_uniform";
  }
  return "unknown";
}

Nature::Nature(int horizon) : horizon_(horizon) {
  Require(horizon >= 0, "horizon must be nonnegative");
  history_.reserve(static_cast<std::size_t>(horizon));
}

double Nature::NextPStar(Rng& rng) {
  if (pending_) throw StateError("previous p* has not been observed");
  if (elapsed() >= horizon_) throw StateError("nature horizon exhausted");
  pending_ = true;
  return Draw(rng);
}

void Nature::Observe(std::uint8_t x) {
  if (!pending_) throw StateError("no pending step to observe");
  if (x > 1) throw std::invalid_argument("outcome must be 0 or 1");
  pending_ = false;
  history_.push_back(x);
  Update(x);
}

std::uint8_t SampleOutcome(double pstar, Rng& rng) {
  Require(pstar >= 0.0 && pstar <= 1.0, "p* must lie in [0, 1]");
  return rng.Bernoulli(pstar) ? 1 : 0;
}

int EpochCount(double c) {
  Require(c > 0.0, "c must be positive");
  return static_cast<int>(std::floor(std::log2(1.0 / (8.0 * c))));
}

std::vector<double> HedgingFifthsPStar(int horizon) {
  Require(horizon >= 0 && horizon % 2 == 0,
          "hedging_fifths needs an even horizon");
  std::vector<double> p(static_cast<std::size_t>(horizon), 0.2);
  std::fill(p.begin() + horizon / 2, p.end(), 0.8);
  return p;
}

std::vector<double> ConstantPStar(double level, int horizon) {
  Require(level >= 0.0 && level <= 1.0, "constant level must lie in [0, 1]");
  Require(horizon >= 0, "horizon must be nonnegative");
  return std::vector<double>(static_cast<std::size_t>(horizon), level);
}

std::unique_ptr<Nature> MakeProduct(std::vector<double> pstar) {
  CheckPredictions(pstar);
  return std::make_unique<ProductNature>(std::move(pstar));
}

std::unique_ptr<Nature> MakeBinarySearch(double epsilon, int horizon) {
  Require(epsilon > 0.0 && epsilon < 0.25,
          "binary_search needs epsilon in (0, 1/4)");
  Require(horizon >= 1, "binary_search needs T >= 1");
  return std::make_unique<BinarySearchNature>(epsilon, horizon);
}

std::unique_ptr<Nature> MakeSmoothedHedging(double c, int horizon) {
  Require(c > 0.0 && c < 0.2, "smoothed_hedging needs c in (0, 1/5)");
  Require(horizon >= 2 && horizon % 2 == 0,
          "smoothed_hedging needs an even T >= 2");
  return std::make_unique<SmoothedHedgingNature>(c, horizon);
}

std::unique_ptr<Nature> MakeEpochBinarySearch(double c, int horizon) {
  Require(c > 0.0 && c <= 1.0 / 16, "epoch nature needs c in (0, 1/16]");
  const int k = EpochCount(c);
  Require(horizon >= 5 * k && horizon % (5 * k) == 0,
          "epoch nature with c = " + std::to_string(c) + " (k = " +
              std::to_string(k) + " epochs) needs T to be a multiple of " +
              std::to_string(5 * k));
  return std::make_unique<EpochNature>(c, horizon);
}

std::unique_ptr<Nature> MakeSmoothedUniform(double c, double center,
                                            int horizon) {
  Require(c > 0.0 && c <= 1.0, "smoothed_uniform needs c in (0, 1]");
  Require(center - c / 2 >= 0.0 && center + c / 2 <= 1.0,
          "smoothed_uniform interval must lie inside [0, 1]");
  Require(horizon >= 0, "horizon must be nonnegative");
  return std::make_unique<SmoothedUniformNature>(c, center, horizon);
}

std::unique_ptr<Nature> MakeNature(const NatureSpec& spec) {
  Require(spec.horizon >= 0, "T must be nonnegative");
  auto need = [&](const std::optional<double>& v, const char* name) {
    Require(v.has_value(), std::string(NatureKindName(spec.kind)) +
                               " nature needs parameter '" + name + "'");
    return *v;
  };
  switch (spec.kind) {
    case NatureKind::kProduct: {
      std::vector<double> pstar = spec.pstar;
      if (pstar.size() == 1) {
        pstar.assign(static_cast<std::size_t>(spec.horizon), spec.pstar[0]);
      }
      Require(pstar.size() == static_cast<std::size_t>(spec.horizon),
              "product nature needs a pstar vector of length T (or 1)");
      return MakeProduct(std::move(pstar));
    }
    case NatureKind::kBinarySearch: {
      const double eps = spec.epsilon.value_or(
          spec.horizon > 0 ? 1.0 / (4.0 * std::sqrt(spec.horizon)) : 0.1);
      return MakeBinarySearch(eps, spec.horizon);
    }
    case NatureKind::kSmoothedHedging:
      return MakeSmoothedHedging(need(spec.c, "c"), spec.horizon);
    case NatureKind::kEpochBinarySearch:
      return MakeEpochBinarySearch(need(spec.c, "c"), spec.horizon);
    case NatureKind::kSmoothedUniform:
      return MakeSmoothedUniform(need(spec.c, "c"), spec.center.value_or(0.5),
                                 spec.horizon);
  }
  throw std::invalid_argument("unknown nature kind");
}

NatureSpec ProductSpec(std::vector<double> pstar) {
  NatureSpec s;
  s.kind = NatureKind::kProduct;
  s.horizon = static_cast<int>(pstar.size());
  s.pstar = std::move(pstar);
  return s;
}

NatureSpec HedgingFifthsSpec(int horizon) {
  return ProductSpec(HedgingFifthsPStar(horizon));
}

NatureSpec ConstantSpec(double level, int horizon) {
  NatureSpec s;
  s.kind = NatureKind::kProduct;
  s.horizon = horizon;
  s.pstar = {level};
  return s;
}

NatureSpec BinarySearchSpec(double epsilon, int horizon) {
  NatureSpec s;
  s.kind = NatureKind::kBinarySearch;
  s.horizon = horizon;
  s.epsilon = epsilon;
  return s;
}

NatureSpec SmoothedHedgingSpec(double c, int horizon) {
  NatureSpec s;
  s.kind = NatureKind::kSmoothedHedging;
  s.horizon = horizon;
  s.c = c;
  return s;
}

NatureSpec EpochSpec(double c, int horizon) {
  NatureSpec s;
  s.kind = NatureKind::kEpochBinarySearch;
  s.horizon = horizon;
  s.c = c;
  return s;
}

NatureSpec SmoothedUniformSpec(double c, int horizon, double center) {
  NatureSpec s;
  s.kind = NatureKind::kSmoothedUniform;
  s.horizon = horizon;
  s.c = c;
  s.center = center;
  return s;
}

}  // namespace calib

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
#include "calib/oracle.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "calib/measures.h"
#include "calib/rng.h"
#include "calib/statistics.h"

namespace calib {

namespace {

double StepObjective(std::span<const std::uint8_t> x, std::span<const double> p,
                     double a) {
  double s = 0.0;
  for (std::size_t t = 0; t < x.size(); ++t) {
    if (p[t] <= a) s += x[t] - p[t];
  }
  return std::abs(s);
}

double SignObjective(std::span<const std::uint8_t> x, std::span<const double> p,
                     double a) {
  double s = 0.0;
  for (std::size_t t = 0; t < x.size(); ++t) {
    const double r = x[t] - p[t];
    if (p[t] < a) {
      s += r;
    } else if (p[t] > a) {
      s -= r;
    }
  }
  return std::abs(s);
}

double VCalObjective(std::span<const std::uint8_t> x, std::span<const double> p,
                     double a) {
  double x_minus = 0.0, n_minus = 0.0, x_plus = 0.0, n_plus = 0.0;
  for (std::size_t t = 0; t < x.size(); ++t) {
    if (p[t] < a) {
      x_minus += x[t];
      n_minus += 1.0;
    } else if (p[t] > a) {
      x_plus += x[t];
      n_plus += 1.0;
    }
  }
  return 2.0 * std::max({x_minus - a * n_minus, a * n_plus - x_plus, 0.0});
}

std::vector<double> SortedDistinct(std::span<const double> p) {
  std::vector<double> q(p.begin(), p.end());
  std::sort(q.begin(), q.end());
  q.erase(std::unique(q.begin(), q.end()), q.end());
  return q;
}

double NaiveStep(std::span<const std::uint8_t> x, std::span<const double> p) {
  double best = 0.0;
  for (double a : p) best = std::max(best, StepObjective(x, p, a));
  return best;
}

double NaiveSign(std::span<const std::uint8_t> x, std::span<const double> p) {
  const std::vector<double> q = SortedDistinct(p);
  std::vector<double> cands = {0.0, 1.0};
  for (std::size_t j = 0; j < q.size(); ++j) {
    cands.push_back(q[j]);
    if (j + 1 < q.size()) cands.push_back(0.5 * (q[j] + q[j + 1]));
  }
  double best = 0.0;
  for (double a : cands) best = std::max(best, SignObjective(x, p, a));
  return best;
}

double NaiveVCal(std::span<const std::uint8_t> x, std::span<const double> p) {
  const std::vector<double> q = SortedDistinct(p);
  // Gap boundaries: 0, q_1, ..., q_m, 1.
  std::vector<double> bounds = {0.0};
  for (double v : q) bounds.push_back(v);
  bounds.push_back(1.0);
  double best = 0.0;
  for (double a : q) best = std::max(best, VCalObjective(x, p, a));
  best = std::max({best, VCalObjective(x, p, 0.0), VCalObjective(x, p, 1.0)});
  for (std::size_t g = 0; g + 1 < bounds.size(); ++g) {
    const double lo = bounds[g], hi = bounds[g + 1];
    if (!(lo < hi)) continue;
    // Counts are constant on the open gap; each branch is linear in a.
    const double mid = 0.5 * (lo + hi);
    double x_minus = 0.0, n_minus = 0.0, x_plus = 0.0, n_plus = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
      if (p[t] < mid) {
        x_minus += x[t];
        n_minus += 1.0;
      } else {
        x_plus += x[t];
        n_plus += 1.0;
      }
    }
    best = std::max(best, 2.0 * (x_minus - lo * n_minus));
    best = std::max(best, 2.0 * (hi * n_plus - x_plus));
  }
  return best;
}

double NaiveEce(std::span<const std::uint8_t> x, std::span<const double> p) {
  std::map<double, double> residual;
  for (std::size_t t = 0; t < x.size(); ++t) residual[p[t]] += x[t] - p[t];
  double s = 0.0;
  for (const auto& [level, r] : residual) s += std::abs(r);
  return s;
}

double Inner(std::span<const std::uint8_t> x, std::span<const double> p,
             MeasureKind inner) {
  if (x.empty()) return 0.0;
  switch (inner) {
    case MeasureKind::kStep:
      return NaiveStep(x, p);
    case MeasureKind::kSign:
      return NaiveSign(x, p);
    case MeasureKind::kVCal:
      return NaiveVCal(x, p);
    case MeasureKind::kEce:
      return NaiveEce(x, p);
    case MeasureKind::kSmooth:
      return SmoothCE(x, p).value;
    default:
      break;
  }
  throw std::invalid_argument("subset oracle: unsupported inner measure '" +
                              std::string(MeasureName(inner)) + "'");
}

std::string Describe(std::uint64_t seed, std::size_t index,
                     std::span<const std::uint8_t> x,
                     std::span<const double> p) {
  std::ostringstream os;
  os.precision(17);
  os << "seed=" << seed << " i=" << index << " T=" << x.size() << " x=";
  for (auto v : x) os << static_cast<int>(v);
  os << " p=";
  for (std::size_t t = 0; t < p.size(); ++t) os << (t ? ":" : "") << p[t];
  return os.str();
}

}  // namespace

double GridSupOracle(std::span<const std::uint8_t> x, std::span<const double> p,
                     GridObjective objective, double grid_step) {
  CheckSameLength(x.size(), p.size());
  if (!(grid_step > 0.0 && grid_step <= kMaxOracleGridStep)) {
    throw std::invalid_argument("grid_step must lie in (0, 1e-3]");
  }
  std::vector<double> alphas;
  const long n = static_cast<long>(std::floor(1.0 / grid_step));
  for (long i = 0; i <= n; ++i) alphas.push_back(i * grid_step);
  alphas.push_back(1.0);
  for (double v : p) {
    for (double a : {v - kOracleBreakpointOffset, v, v + kOracleBreakpointOffset}) {
      if (a >= 0.0 && a <= 1.0) alphas.push_back(a);
    }
  }
  double best = 0.0;
  for (double a : alphas) {
    double v = 0.0;
    switch (objective) {
      case GridObjective::kStep:
        v = StepObjective(x, p, a);
        break;
      case GridObjective::kSign:
        v = SignObjective(x, p, a);
        break;
      case GridObjective::kVCal:
        v = VCalObjective(x, p, a);
        break;
    }
    best = std::max(best, v);
  }
  return best;
}

double SubsetEnumerationOracle(std::span<const std::uint8_t> x,
                               std::span<const double> p, MeasureKind inner) {
  CheckSameLength(x.size(), p.size());
  const std::size_t horizon = x.size();
  if (horizon > kMaxSubsetOracleHorizon) {
    throw CapabilityError("subset enumeration is limited to T <= " +
                          std::to_string(kMaxSubsetOracleHorizon));
  }
  const std::size_t count = std::size_t{1} << horizon;
  std::vector<double> values(count);
  EventSequence sx;
  PredictionSequence sp;
  for (std::size_t mask = 0; mask < count; ++mask) {
    sx.clear();
    sp.clear();
    for (std::size_t t = 0; t < horizon; ++t) {
      if (mask >> t & 1) {
        sx.push_back(x[t]);
        sp.push_back(p[t]);
      }
    }
    values[mask] = Inner(sx, sp, inner);
  }
  return PairwiseSum(values) / static_cast<double>(count);
}

double SmoothGridOracle(std::span<const std::uint8_t> x,
                        std::span<const double> p, double f_grid_step) {
  CheckSameLength(x.size(), p.size());
  if (!(f_grid_step > 0.0)) {
    throw std::invalid_argument("2 / f_grid_step must be a positive integer");
  }
  const double cells = 2.0 / f_grid_step;
  const long g = std::lround(cells);
  if (g < 1 || std::abs(cells - g) > 1e-9) {
    throw std::invalid_argument("2 / f_grid_step must be a positive integer");
  }
  const std::vector<double> q = SortedDistinct(p);
  if (q.size() > kMaxSmoothOracleLevels) {
    throw CapabilityError("smooth grid oracle is limited to 6 levels");
  }
  if (q.empty()) return 0.0;
  std::vector<double> w(q.size(), 0.0);
  for (std::size_t t = 0; t < x.size(); ++t) {
    const auto j = std::lower_bound(q.begin(), q.end(), p[t]) - q.begin();
    w[j] += x[t] - p[t];
  }
  const auto value = [&](long i) { return -1.0 + 2.0 * i / g; };
  std::vector<double> best(g + 1), next(g + 1);
  for (long i = 0; i <= g; ++i) best[i] = w[0] * value(i);
  for (std::size_t j = 1; j < q.size(); ++j) {
    const double gap = q[j] - q[j - 1];
    for (long i = 0; i <= g; ++i) {
      double m = -INFINITY;
      for (long k = 0; k <= g; ++k) {
        if (std::abs(value(k) - value(i)) <= gap + 1e-12) {
          m = std::max(m, best[k]);
        }
      }
      next[i] = m + w[j] * value(i);
    }
    best.swap(next);
  }
  return std::max(0.0, *std::max_element(best.begin(), best.end()));
}

double SmoothGridSlack(std::span<const std::uint8_t> x,
                       std::span<const double> p, double f_grid_step) {
  std::map<double, double> w;
  for (std::size_t t = 0; t < x.size(); ++t) w[p[t]] += x[t] - p[t];
  double total = 0.0;
  for (const auto& [level, v] : w) total += std::abs(v);
  return static_cast<double>(w.size()) * f_grid_step * total;
}

Instance RandomInstance(std::uint64_t seed, std::size_t horizon) {
  Rng rng(seed);
  Instance in;
  const bool tenths = rng.Bernoulli(0.5);
  for (std::size_t t = 0; t < horizon; ++t) {
    in.x.push_back(rng.Bernoulli(0.5) ? 1 : 0);
    if (tenths) {
      in.p.push_back(static_cast<double>(rng.NextU64() % 11) / 10.0);
    } else {
      in.p.push_back(rng.Uniform01());
    }
  }
  return in;
}

Instance BatteryInstance(const OracleBatteryConfig& config, std::size_t index) {
  const std::uint64_t seed = DeriveSeed(config.seed, index);
  return RandomInstance(seed, 1 + Mix64(seed) % config.max_horizon);
}

std::vector<OracleReport> RunOracleBattery(const OracleBatteryConfig& config) {
  if (config.max_horizon > kMaxSubsetOracleHorizon) {
    throw CapabilityError("oracle battery is limited to T <= " +
                          std::to_string(kMaxSubsetOracleHorizon));
  }
  if (config.max_horizon == 0) {
    throw std::invalid_argument("max_horizon must be positive");
  }
  std::vector<OracleReport> out;
  for (std::size_t i = 0; i < config.instances; ++i) {
    const Instance in = BatteryInstance(config, i);
    const std::size_t horizon = in.x.size();
    const std::string desc = Describe(config.seed, i, in.x, in.p);
    const double grid_tol = 1e-6 + horizon * config.grid_step;

    const auto add = [&](MeasureKind kind, double optimized, double oracle,
                         double tolerance) {
      out.push_back({kind, optimized, oracle, std::abs(optimized - oracle),
                     tolerance, desc});
    };
    add(MeasureKind::kStep, StepCE(in.x, in.p).value,
        GridSupOracle(in.x, in.p, GridObjective::kStep, config.grid_step),
        grid_tol);
    add(MeasureKind::kSign, SignCE(in.x, in.p).value,
        GridSupOracle(in.x, in.p, GridObjective::kSign, config.grid_step),
        grid_tol);
    add(MeasureKind::kVCal, VCal(in.x, in.p).value,
        GridSupOracle(in.x, in.p, GridObjective::kVCal, config.grid_step),
        grid_tol);
    add(MeasureKind::kStepSub, StepCESubExact(in.x, in.p).value,
        SubsetEnumerationOracle(in.x, in.p, MeasureKind::kStep), 1e-9);
    add(MeasureKind::kSsce, SsceExact(in.x, in.p).value,
        SubsetEnumerationOracle(in.x, in.p, MeasureKind::kSmooth), 1e-9);
    if (SortedDistinct(in.p).size() <= kMaxSmoothOracleLevels) {
      add(MeasureKind::kSmooth, SmoothCE(in.x, in.p).value,
          SmoothGridOracle(in.x, in.p, config.f_grid_step),
          SmoothGridSlack(in.x, in.p, config.f_grid_step) + 1e-9);
    }
  }
  return out;
}

}  // namespace calib

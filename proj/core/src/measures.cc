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
#include "calib/measures.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "calib/statistics.h"

namespace calib {

namespace {

using std::abs;
using boost::multiprecision::abs;

template <class Real>
void CheckInstance(std::span<const std::uint8_t> x, std::span<const Real> p) {
  CheckSameLength(x.size(), p.size());
  CheckEvents(x);
  for (std::size_t t = 0; t < p.size(); ++t) {
    if (!(p[t] >= 0 && p[t] <= 1)) {
      throw std::invalid_argument("prediction at index " + std::to_string(t) +
                                  " is outside [0, 1]");
    }
  }
}

template <class Real>
MeasureValue Exact(MeasureKind kind, const Real& v) {
  MeasureValue out;
  out.kind = kind;
  out.exactness = Exactness::kExact;
  out.value = static_cast<double>(v);
  return out;
}

MeasureValue FromSamples(MeasureKind kind, std::span<const double> samples) {
  const SampleSummary s = Summarize(samples);
  MeasureValue out;
  out.kind = kind;
  out.exactness = Exactness::kMonteCarlo;
  out.value = s.mean;
  out.std_error = s.std_error;
  out.replicates = s.n;
  return out;
}

// Averages `eval` over every subset of [T] in a fixed enumeration order.
template <class Real, class Eval>
double EnumerateSubsets(const SortedInstance<Real>& inst, Eval eval) {
  const std::size_t horizon = inst.horizon();
  const std::uint64_t count = std::uint64_t{1} << horizon;
  SubsetMask mask(horizon, 0);
  std::vector<double> values(count);
  for (std::uint64_t s = 0; s < count; ++s) {
    for (std::size_t t = 0; t < horizon; ++t) mask[t] = (s >> t) & 1U;
    values[s] = static_cast<double>(eval(inst.Levels(mask)));
  }
  return PairwiseSum(values) / static_cast<double>(count);
}

template <class Real, class Eval>
MeasureValue SampleSubsets(MeasureKind kind, std::span<const std::uint8_t> x,
                           std::span<const Real> p, SubsetSampler& sampler,
                           Eval eval) {
  CheckInstance(x, p);
  const SortedInstance<Real> inst(x, p);
  std::vector<double> values(sampler.replicates());
  for (auto& v : values) {
    const SubsetMask mask = sampler.Next(x.size());
    v = static_cast<double>(eval(inst.Levels(mask)));
  }
  return FromSamples(kind, values);
}

// Concave piecewise-linear function given by its vertices, f ascending.
template <class Real>
struct Vertex {
  Real f;
  Real v;
};

template <class Real>
Real Interpolate(const Vertex<Real>& a, const Vertex<Real>& b, const Real& f) {
  if (b.f == a.f) return std::max(a.v, b.v);
  return a.v + (b.v - a.v) * ((f - a.f) / (b.f - a.f));
}

// g(f) = max_{|h - f| <= d} g_prev(h): the rising part moves left by d, the
// falling part right by d, and the peak widens into a plateau.
template <class Real>
std::vector<Vertex<Real>> RelaxWindow(const std::vector<Vertex<Real>>& fn,
                                      const Real& d) {
  Real peak = fn.front().v;
  for (const auto& vx : fn) peak = std::max(peak, vx.v);
  std::size_t lo = 0;
  while (fn[lo].v != peak) ++lo;
  std::size_t hi = fn.size() - 1;
  while (fn[hi].v != peak) --hi;

  std::vector<Vertex<Real>> out;
  out.reserve(fn.size() + 2);
  for (std::size_t i = 0; i <= lo; ++i) out.push_back({fn[i].f - d, fn[i].v});
  out.push_back({fn[hi].f + d, peak});
  for (std::size_t i = hi + 1; i < fn.size(); ++i) {
    out.push_back({fn[i].f + d, fn[i].v});
  }
  return out;
}

// Restricts the domain to [-1, 1]. The input domain always covers it.
template <class Real>
std::vector<Vertex<Real>> ClipUnit(const std::vector<Vertex<Real>>& fn) {
  const Real lo(-1), hi(1);
  std::vector<Vertex<Real>> out;
  out.reserve(fn.size());
  for (std::size_t i = 0; i + 1 < fn.size(); ++i) {
    if (fn[i].f <= lo && fn[i + 1].f >= lo) {
      out.push_back({lo, Interpolate(fn[i], fn[i + 1], lo)});
      break;
    }
  }
  for (const auto& vx : fn) {
    if (vx.f > lo && vx.f < hi) out.push_back(vx);
  }
  for (std::size_t i = 0; i + 1 < fn.size(); ++i) {
    if (fn[i].f <= hi && fn[i + 1].f >= hi) {
      out.push_back({hi, Interpolate(fn[i], fn[i + 1], hi)});
      break;
    }
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// SortedInstance

template <class Real>
SortedInstance<Real>::SortedInstance(std::span<const std::uint8_t> x,
                                     std::span<const Real> p)
    : x_(x.begin(), x.end()), order_(x.size()) {
  CheckSameLength(x.size(), p.size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  std::stable_sort(order_.begin(), order_.end(),
                   [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
  for (std::size_t i = 0; i < order_.size(); ++i) {
    if (i == 0 || p[order_[i]] != levels_.back()) {
      levels_.push_back(p[order_[i]]);
      level_start_.push_back(i);
    }
  }
  level_start_.push_back(order_.size());
}

template <class Real>
LevelTable<Real> SortedInstance<Real>::Levels() const {
  LevelTable<Real> t;
  const std::size_t m = levels_.size();
  t.level = levels_;
  t.count.resize(m);
  t.ones.resize(m);
  t.residual.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    std::int64_t n = 0, s = 0;
    for (std::size_t i = level_start_[j]; i < level_start_[j + 1]; ++i) {
      ++n;
      s += x_[order_[i]];
    }
    t.count[j] = n;
    t.ones[j] = s;
    t.residual[j] = Real(s) - Real(n) * levels_[j];
  }
  return t;
}

template <class Real>
LevelTable<Real> SortedInstance<Real>::Levels(
    std::span<const std::uint8_t> mask) const {
  CheckSameLength(x_.size(), mask.size());
  LevelTable<Real> t;
  const std::size_t m = levels_.size();
  t.level = levels_;
  t.count.resize(m);
  t.ones.resize(m);
  t.residual.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    std::int64_t n = 0, s = 0;
    for (std::size_t i = level_start_[j]; i < level_start_[j + 1]; ++i) {
      const std::size_t idx = order_[i];
      if (mask[idx]) {
        ++n;
        s += x_[idx];
      }
    }
    t.count[j] = n;
    t.ones[j] = s;
    t.residual[j] = Real(s) - Real(n) * levels_[j];
  }
  return t;
}

// ---------------------------------------------------------------------------
// Level-table evaluators

template <class Real>
Real StepFromLevels(const LevelTable<Real>& t) {
  // Below the smallest level the prefix is empty, hence the 0 start.
  Real best(0), prefix(0);
  for (std::size_t j = 0; j < t.size(); ++j) {
    prefix += t.residual[j];
    best = std::max(best, Real(abs(prefix)));
  }
  return best;
}

template <class Real>
Real VCalFromLevels(const LevelTable<Real>& t) {
  const std::size_t m = t.size();
  std::int64_t n_total = 0, x_total = 0;
  for (std::size_t j = 0; j < m; ++j) {
    n_total += t.count[j];
    x_total += t.ones[j];
  }
  Real best(0);
  auto consider = [&](const Real& a, std::int64_t n_below, std::int64_t x_below,
                      std::int64_t n_above, std::int64_t x_above) {
    const Real below = Real(x_below) - a * Real(n_below);
    const Real above = a * Real(n_above) - Real(x_above);
    best = std::max(best, std::max(below, above));
  };

  // Open gap j lies between level j-1 and level j (gap 0 starts at 0, gap m
  // ends at 1). Counts are constant on the gap and the objective is linear,
  // so its supremum is one of the two endpoint limits.
  std::int64_t n_le = 0, x_le = 0;
  for (std::size_t j = 0; j <= m; ++j) {
    const Real left = j == 0 ? Real(0) : t.level[j - 1];
    const Real right = j == m ? Real(1) : t.level[j];
    if (left < right) {
      consider(left, n_le, x_le, n_total - n_le, x_total - x_le);
      consider(right, n_le, x_le, n_total - n_le, x_total - x_le);
    }
    if (j < m) {
      // a exactly at level j: that level is neither below nor above.
      consider(t.level[j], n_le, x_le, n_total - n_le - t.count[j],
               x_total - x_le - t.ones[j]);
      n_le += t.count[j];
      x_le += t.ones[j];
    }
  }
  return Real(2) * best;
}

template <class Real>
Real SignFromLevels(const LevelTable<Real>& t) {
  const std::size_t m = t.size();
  Real total(0);
  for (const auto& r : t.residual) total += r;
  Real best(0), below(0);
  for (std::size_t j = 0; j <= m; ++j) {
    const Real left = j == 0 ? Real(0) : t.level[j - 1];
    const Real right = j == m ? Real(1) : t.level[j];
    if (left < right) {
      // Open gap: everything at or below level j-1 counts +1, the rest -1.
      best = std::max(best, Real(abs(below - (total - below))));
    }
    if (j < m) {
      const Real above = total - below - t.residual[j];
      best = std::max(best, Real(abs(below - above)));
      below += t.residual[j];
    }
  }
  return best;
}

template <class Real>
Real EceFromLevels(const LevelTable<Real>& t) {
  Real sum(0);
  for (const auto& r : t.residual) sum += abs(r);
  return sum;
}

template <class Real>
Real SmoothFromLevels(const LevelTable<Real>& t) {
  // Empty levels carry no weight; skipping them is equivalent to chaining
  // the Lipschitz constraint through them.
  std::vector<std::size_t> live;
  for (std::size_t j = 0; j < t.size(); ++j) {
    if (t.count[j] > 0) live.push_back(j);
  }
  if (live.empty()) return Real(0);

  const Real w0 = t.residual[live[0]];
  std::vector<Vertex<Real>> fn = {{Real(-1), -w0}, {Real(1), w0}};
  for (std::size_t k = 1; k < live.size(); ++k) {
    const Real gap = t.level[live[k]] - t.level[live[k - 1]];
    fn = ClipUnit(RelaxWindow(fn, gap));
    const Real w = t.residual[live[k]];
    for (auto& vx : fn) vx.v += w * vx.f;
  }
  Real best = fn.front().v;
  for (const auto& vx : fn) best = std::max(best, vx.v);
  return std::max(best, Real(0));
}

template class SortedInstance<double>;
template class SortedInstance<Precise>;
template double StepFromLevels(const LevelTable<double>&);
template Precise StepFromLevels(const LevelTable<Precise>&);
template double VCalFromLevels(const LevelTable<double>&);
template Precise VCalFromLevels(const LevelTable<Precise>&);
template double SignFromLevels(const LevelTable<double>&);
template Precise SignFromLevels(const LevelTable<Precise>&);
template double EceFromLevels(const LevelTable<double>&);
template Precise EceFromLevels(const LevelTable<Precise>&);
template double SmoothFromLevels(const LevelTable<double>&);

// ---------------------------------------------------------------------------
// SubsetSampler

SubsetSampler::SubsetSampler(std::size_t replicates, std::uint64_t seed)
    : replicates_(replicates), rng_(seed) {
  if (replicates == 0) {
    throw std::invalid_argument("subset sampler needs at least 1 replicate");
  }
}

SubsetMask SubsetSampler::Next(std::size_t horizon) {
  SubsetMask mask(horizon);
  std::uint64_t bits = 0;
  for (std::size_t t = 0; t < horizon; ++t) {
    if (t % 64 == 0) bits = rng_.NextU64();
    mask[t] = bits & 1U;
    bits >>= 1;
  }
  return mask;
}

// ---------------------------------------------------------------------------
// Public measures

namespace {

template <class Real>
MeasureValue StepImpl(std::span<const std::uint8_t> x,
                      std::span<const Real> p) {
  CheckInstance(x, p);
  return Exact(MeasureKind::kStep,
               StepFromLevels(SortedInstance<Real>(x, p).Levels()));
}

template <class Real>
MeasureValue VCalImpl(std::span<const std::uint8_t> x,
                      std::span<const Real> p) {
  CheckInstance(x, p);
  return Exact(MeasureKind::kVCal,
               VCalFromLevels(SortedInstance<Real>(x, p).Levels()));
}

template <class Real>
MeasureValue UCalImpl(std::span<const std::uint8_t> x,
                      std::span<const Real> p) {
  MeasureValue out = VCalImpl(x, p);
  out.kind = MeasureKind::kUCalBounds;
  out.exactness = Exactness::kInterval;
  out.lower = out.value;
  out.upper = 2.0 * out.value;
  return out;
}

template <class Real>
MeasureValue SignImpl(std::span<const std::uint8_t> x,
                      std::span<const Real> p) {
  CheckInstance(x, p);
  return Exact(MeasureKind::kSign,
               SignFromLevels(SortedInstance<Real>(x, p).Levels()));
}

template <class Real>
MeasureValue EceImpl(std::span<const std::uint8_t> x,
                     std::span<const Real> p) {
  CheckInstance(x, p);
  return Exact(MeasureKind::kEce,
               EceFromLevels(SortedInstance<Real>(x, p).Levels()));
}

}  // namespace

MeasureValue StepCE(std::span<const std::uint8_t> x,
                    std::span<const double> p) {
  return StepImpl(x, p);
}
MeasureValue StepCE(std::span<const std::uint8_t> x,
                    std::span<const Precise> p) {
  return StepImpl(x, p);
}

MeasureValue StepCESub(std::span<const std::uint8_t> x,
                       std::span<const double> p, SubsetSampler& sampler) {
  return SampleSubsets(MeasureKind::kStepSub, x, p, sampler,
                       StepFromLevels<double>);
}
MeasureValue StepCESub(std::span<const std::uint8_t> x,
                       std::span<const Precise> p, SubsetSampler& sampler) {
  return SampleSubsets(MeasureKind::kStepSub, x, p, sampler,
                       StepFromLevels<Precise>);
}

MeasureValue StepCESubExact(std::span<const std::uint8_t> x,
                            std::span<const double> p) {
  CheckInstance(x, p);
  if (x.size() > kMaxStepSubExactHorizon) {
    throw CapabilityError(
        "exact subsampled step calibration enumerates 2^T subsets and is "
        "limited to T <= " +
        std::to_string(kMaxStepSubExactHorizon) +
        "; use the Monte Carlo estimator instead");
  }
  const SortedInstance<double> inst(x, p);
  return Exact(MeasureKind::kStepSub,
               EnumerateSubsets(inst, StepFromLevels<double>));
}

MeasureValue VCal(std::span<const std::uint8_t> x, std::span<const double> p) {
  return VCalImpl(x, p);
}
MeasureValue VCal(std::span<const std::uint8_t> x,
                  std::span<const Precise> p) {
  return VCalImpl(x, p);
}

MeasureValue VCalSub(std::span<const std::uint8_t> x,
                     std::span<const double> p, SubsetSampler& sampler) {
  return SampleSubsets(MeasureKind::kVCalSub, x, p, sampler,
                       VCalFromLevels<double>);
}
MeasureValue VCalSub(std::span<const std::uint8_t> x,
                     std::span<const Precise> p, SubsetSampler& sampler) {
  return SampleSubsets(MeasureKind::kVCalSub, x, p, sampler,
                       VCalFromLevels<Precise>);
}

MeasureValue UCalBounds(std::span<const std::uint8_t> x,
                        std::span<const double> p) {
  return UCalImpl(x, p);
}
MeasureValue UCalBounds(std::span<const std::uint8_t> x,
                        std::span<const Precise> p) {
  return UCalImpl(x, p);
}

MeasureValue SignCE(std::span<const std::uint8_t> x,
                    std::span<const double> p) {
  return SignImpl(x, p);
}
MeasureValue SignCE(std::span<const std::uint8_t> x,
                    std::span<const Precise> p) {
  return SignImpl(x, p);
}

MeasureValue Ece(std::span<const std::uint8_t> x, std::span<const double> p) {
  return EceImpl(x, p);
}
MeasureValue Ece(std::span<const std::uint8_t> x, std::span<const Precise> p) {
  return EceImpl(x, p);
}

MeasureValue SmoothCE(std::span<const std::uint8_t> x,
                      std::span<const double> p) {
  CheckInstance(x, p);
  return Exact(MeasureKind::kSmooth,
               SmoothFromLevels(SortedInstance<double>(x, p).Levels()));
}

MeasureValue Ssce(std::span<const std::uint8_t> x, std::span<const double> p,
                  SubsetSampler& sampler) {
  return SampleSubsets(MeasureKind::kSsce, x, p, sampler,
                       SmoothFromLevels<double>);
}

MeasureValue SsceExact(std::span<const std::uint8_t> x,
                       std::span<const double> p) {
  CheckInstance(x, p);
  if (x.size() > kMaxSsceExactHorizon) {
    throw CapabilityError("exhaustive SSCE is limited to T <= " +
                          std::to_string(kMaxSsceExactHorizon) +
                          "; use the Monte Carlo estimator instead");
  }
  const SortedInstance<double> inst(x, p);
  return Exact(MeasureKind::kSsce,
               EnumerateSubsets(inst, SmoothFromLevels<double>));
}

double Gamma(double v) {
  if (!(v >= 0.0)) throw std::invalid_argument("gamma needs v >= 0");
  return v <= 1.0 ? v : std::sqrt(v);
}

}  // namespace calib

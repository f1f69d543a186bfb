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
#ifndef CALIB_ENVIRONMENTS_H_
#define CALIB_ENVIRONMENTS_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "calib/precise.h"
#include "calib/rng.h"
#include "calib/types.h"

namespace calib {

enum class NatureKind {
  kProduct,            // fixed p* vector, independent outcomes
  kBinarySearch,       // p*_{t+1} = p*_t +/- eps / 2^t
  kSmoothedHedging,    // U[1/5 - c, 1/5 + c] then U[4/5 - c, 4/5 + c]
  kEpochBinarySearch,  // k binary-search epochs of width-c uniforms, then a
                       // long epoch split between U[0, c] and U[1 - c, 1]
  kSmoothedUniform,    // i.i.d. U[center - c/2, center + c/2]
};

std::string_view NatureKindName(NatureKind kind);

struct NatureSpec {
  NatureKind kind = NatureKind::kProduct;
  int horizon = 0;
  std::optional<double> epsilon;
  std::optional<double> c;
  std::optional<double> center;
  // Product natures: length `horizon`, or a single value repeated.
  std::vector<double> pstar;
};

// Generates p*_t one step at a time and tracks the realized history.
// Usage per step: NextPStar, then Observe with the realized outcome.
class Nature {
 public:
  virtual ~Nature() = default;

  int horizon() const { return horizon_; }
  int elapsed() const { return static_cast<int>(history_.size()); }
  const EventSequence& history() const { return history_; }

  // Draws p*_t for the next step. Throws StateError once the horizon is
  // exhausted or when the previous draw has not been observed yet.
  double NextPStar(Rng& rng);
  // Records x_t for the pending step.
  void Observe(std::uint8_t x);

  // Exact value of the pending p*_t for natures whose probabilities need more
  // than double precision. Empty otherwise.
  virtual std::optional<Precise> PendingPrecise() const { return std::nullopt; }
  // Threshold a* for the binary-search constructions, defined once enough of
  // the episode has been observed.
  virtual std::optional<double> AlphaStar() const { return std::nullopt; }
  virtual std::optional<Precise> AlphaStarPrecise() const {
    return std::nullopt;
  }

 protected:
  explicit Nature(int horizon);

  // Step index t (1-based) of the pending draw is elapsed() + 1.
  virtual double Draw(Rng& rng) = 0;
  virtual void Update(std::uint8_t /*x*/) {}

 private:
  int horizon_;
  bool pending_ = false;
  EventSequence history_;
};

// x ~ Bern(pstar). Throws std::invalid_argument unless pstar is in [0, 1].
std::uint8_t SampleOutcome(double pstar, Rng& rng);

std::unique_ptr<Nature> MakeNature(const NatureSpec& spec);

std::unique_ptr<Nature> MakeProduct(std::vector<double> pstar);
std::unique_ptr<Nature> MakeBinarySearch(double epsilon, int horizon);
std::unique_ptr<Nature> MakeSmoothedHedging(double c, int horizon);
std::unique_ptr<Nature> MakeEpochBinarySearch(double c, int horizon);
std::unique_ptr<Nature> MakeSmoothedUniform(double c, double center,
                                            int horizon);

// Preset p* vectors.
std::vector<double> HedgingFifthsPStar(int horizon);  // T/2 x 1/5, T/2 x 4/5
std::vector<double> ConstantPStar(double level, int horizon);

// k = floor(log2(1 / (8c))) for the epoch nature.
int EpochCount(double c);

// Spec shorthands.
NatureSpec ProductSpec(std::vector<double> pstar);
NatureSpec HedgingFifthsSpec(int horizon);
NatureSpec ConstantSpec(double level, int horizon);
NatureSpec BinarySearchSpec(double epsilon, int horizon);
NatureSpec SmoothedHedgingSpec(double c, int horizon);
NatureSpec EpochSpec(double c, int horizon);
NatureSpec SmoothedUniformSpec(double c, int horizon, double center = 0.5);

}  // namespace calib

#endif  // CALIB_ENVIRONMENTS_H_

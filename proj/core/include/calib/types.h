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

#ifndef CALIB_TYPES_H_
#define CALIB_TYPES_H_

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace calib {

// Binary outcomes x_t, one byte each, every entry exactly 0 or 1.
using EventSequence = std::vector<std::uint8_t>;
// Probabilities in [0, 1]. Also used for the conditional probabilities p*.
using PredictionSequence = std::vector<double>;
// y_t = 1 iff timestep t belongs to the subsample S.
using SubsetMask = std::vector<std::uint8_t>;

// Raised when a request exceeds what an exact routine can enumerate, e.g.
// 2^T subsets for large T. Callers should fall back to Monte Carlo.
class CapabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when an object is driven past its lifetime (horizon exhausted).
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

enum class MeasureKind {
  kStep,
  kStepSub,
  kVCal,
  kVCalSub,
  kUCalBounds,
  kSign,
  kEce,
  kSmooth,
  kSsce,
};

enum class Exactness { kExact, kMonteCarlo, kInterval };

std::string_view MeasureName(MeasureKind kind);
// Accepts the canonical names ("step", "step_sub", "vcal", "vcal_sub",
// "ucal", "sign", "ece", "smce", "ssce"). Throws std::invalid_argument.
MeasureKind ParseMeasureKind(std::string_view name);
std::string_view ExactnessName(Exactness e);

struct MeasureValue {
  MeasureKind kind = MeasureKind::kStep;
  Exactness exactness = Exactness::kExact;
  double value = 0.0;
  // Monte Carlo only.
  std::optional<double> std_error;
  std::size_t replicates = 0;
  // Interval only; value holds the lower bound.
  double lower = 0.0;
  double upper = 0.0;
};

// Argument validation shared by every measure. Throws std::invalid_argument.
void CheckEvents(std::span<const std::uint8_t> x);
void CheckPredictions(std::span<const double> p);
void CheckSameLength(std::size_t x_len, std::size_t p_len);

}  // namespace calib

#endif  // CALIB_TYPES_H_

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
#include "calib/types.h"

#include <cmath>
#include <string>

namespace calib {

namespace {

struct NamedMeasure {
  MeasureKind kind;
  std::string_view name;
};

constexpr NamedMeasure kMeasureNames[] = {
    {MeasureKind::kStep, "step"},     {MeasureKind::kStepSub, "step_sub"},
    {MeasureKind::kVCal, "vcal"},     {MeasureKind::kVCalSub, "vcal_sub"},
    {MeasureKind::kUCalBounds, "ucal"}, {MeasureKind::kSign, "sign"},
    {MeasureKind::kEce, "ece"},       {MeasureKind::kSmooth, "smce"},
    {MeasureKind::kSsce, "ssce"},
};

}  // namespace

std::string_view MeasureName(MeasureKind kind) {
  for (const auto& m : kMeasureNames) {
    if (m.kind == kind) return m.name;
  }
  return "unknown";
}

MeasureKind ParseMeasureKind(std::string_view name) {
  for (const auto& m : kMeasureNames) {
    if (m.name == name) return m.kind;
  }
  throw std::invalid_argument("unknown measure '" + std::string(name) + "'");
}

std::string_view ExactnessName(Exactness e) {
  switch (e) {
    case Exactness::kExact:
      return "exact";
    case Exactness::kMonteCarlo:
      return "monte-carlo";
    case Exactness::kInterval:
      return "interval";
  }
  return "unknown";
}

void CheckEvents(std::span<const std::uint8_t> x) {
  for (std::size_t t = 0; t < x.size(); ++t) {
    if (x[t] > 1) {
      throw std::invalid_argument("event at index " + std::to_string(t) +
                                  " is not 0 or 1");
    }
  }
}

void CheckPredictions(std::span<const double> p) {
  for (std::size_t t = 0; t < p.size(); ++t) {
    if (!(p[t] >= 0.0 && p[t] <= 1.0)) {
      throw std::invalid_argument("prediction at index " + std::to_string(t) +
                                  " is outside [0, 1]");
    }
  }
}

void CheckSameLength(std::size_t x_len, std::size_t p_len) {
  if (x_len != p_len) {
    throw std::invalid_argument("length mismatch: " + std::to_string(x_len) +
                                " events vs " + std::to_string(p_len) +
                                " predictions");
  }
}

}  // namespace calib

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

#ifndef CALIB_PRECISE_H_
#define CALIB_PRECISE_H_

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace calib {

// Extended binary floating point for constructions whose probabilities need
// more than 53 mantissa bits (the binary-search nature halves its step every
// round). 2112 bits hold every p* of a binary-search run up to
// kMaxPreciseHorizon steps exactly.
using Precise = boost::multiprecision::number<
    boost::multiprecision::cpp_bin_float<
        2112, boost::multiprecision::digit_base_2>,
    boost::multiprecision::et_off>;

inline constexpr int kMaxPreciseHorizon = 2000;

}  // namespace calib

#endif  // CALIB_PRECISE_H_

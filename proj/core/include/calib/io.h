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
#ifndef CALIB_IO_H_
#define CALIB_IO_H_

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>

#include "calib/environments.h"
#include "calib/forecasters.h"
#include "calib/harness.h"
#include "calib/types.h"

namespace calib {

// Malformed input. `line()` is 1-based, 0 when not tied to a line.
class InputError : public std::invalid_argument {
 public:
  InputError(const std::string& message, int line = 0);
  int line() const { return line_; }

 private:
  int line_;
};

// Reads a transcript with header `t,x,p_star,p` (p_star optional). An empty
// stream yields an empty transcript. pstar and var_T are left empty / zero
// when the p_star column is absent.
Transcript ReadTranscriptCsv(std::istream& in);
Transcript ReadTranscriptCsvFile(const std::string& path);
void WriteTranscriptCsv(std::ostream& out, const Transcript& transcript);

// Round-trippable formatting (%.17g).
std::string FormatDouble(double v);

// Results table: experiment,measure,T,n,mean,sd,stderr,ci_lo,ci_hi,seed.
void WriteResultsHeader(std::ostream& out);
void WriteResultRow(std::ostream& out, std::string_view experiment, int horizon,
                    const MeasureReport& report);

// measure,value,exactness,stderr,replicates,lower,upper.
void WriteMeasureHeader(std::ostream& out);
void WriteMeasureRow(std::ostream& out, const MeasureValue& value);

// {"kind", "T", "epsilon"?, "c"?, "center"?, "pstar"?}. For product natures
// "pstar" is an array or one of the presets "hedging_fifths" / "constant"
// (the latter with "level"). `default_horizon` fills a missing "T". Throws
// InputError.
NatureSpec ParseNatureSpec(std::string_view json, int default_horizon = 0);
// {"kind", "level"?, "k"? (int or "T"), "eta"?, "c"?}. Throws InputError.
ForecasterSpec ParseForecasterSpec(std::string_view json);

}  // namespace calib

#endif  // CALIB_IO_H_

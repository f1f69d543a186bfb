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
#include "calib/io.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

#include <nlohmann/json.hpp>

namespace calib {

namespace {

using nlohmann::json;

std::string_view Trim(std::string_view s) {
  const auto issp = [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
  };
  while (!s.empty() && issp(s.front())) s.remove_prefix(1);
  while (!s.empty() && issp(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> SplitCommas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(Trim(line.substr(start)));
      return out;
    }
    out.push_back(Trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

double ParseReal(std::string_view field, std::string_view column, int line) {
  double v = 0.0;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size() ||
      !std::isfinite(v)) {
    throw InputError("bad " + std::string(column) + " value '" +
                         std::string(field) + "'",
                     line);
  }
  return v;
}

long ParseInteger(std::string_view field, std::string_view column, int line) {
  long v = 0;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw InputError("bad " + std::string(column) + " value '" +
                         std::string(field) + "'",
                     line);
  }
  return v;
}

json ParseJson(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw InputError(std::string("invalid JSON: ") + e.what());
  }
}

std::optional<double> OptionalReal(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  if (!j[key].is_number()) {
    throw InputError(std::string("'") + key + "' must be a number");
  }
  return j[key].get<double>();
}

int RequiredHorizon(const json& j, int default_horizon) {
  if (!j.contains("T")) {
    if (default_horizon > 0) return default_horizon;
    throw InputError("missing 'T'");
  }
  if (!j["T"].is_number_integer() || j["T"].get<long>() <= 0 ||
      j["T"].get<long>() > 100000000) {
    throw InputError("'T' must be a positive integer");
  }
  return static_cast<int>(j["T"].get<long>());
}

}  // namespace

InputError::InputError(const std::string& message, int line)
    : std::invalid_argument(line > 0
                                ? "line " + std::to_string(line) + ": " + message
                                : message),
      line_(line) {}

Transcript ReadTranscriptCsv(std::istream& in) {
  Transcript tr;
  std::string text;
  int line_no = 0;
  bool have_header = false;
  bool has_pstar = false;
  std::size_t columns = 0;
  while (std::getline(in, text)) {
    ++line_no;
    const std::string_view line = Trim(text);
    if (line.empty()) continue;
    const auto fields = SplitCommas(line);
    if (!have_header) {
      const std::vector<std::string_view> with{"t", "x", "p_star", "p"};
      const std::vector<std::string_view> without{"t", "x", "p"};
      if (fields == with) {
        has_pstar = true;
      } else if (fields != without) {
        throw InputError("expected header 't,x,p_star,p' or 't,x,p'", line_no);
      }
      have_header = true;
      columns = fields.size();
      continue;
    }
    if (fields.size() != columns) {
      throw InputError("expected " + std::to_string(columns) + " fields, got " +
                           std::to_string(fields.size()),
                       line_no);
    }
    const long t = ParseInteger(fields[0], "t", line_no);
    if (t != static_cast<long>(tr.x.size()) + 1) {
      throw InputError("t must count up from 1", line_no);
    }
    const long x = ParseInteger(fields[1], "x", line_no);
    if (x != 0 && x != 1) throw InputError("x must be 0 or 1", line_no);
    const double p = ParseReal(fields.back(), "p", line_no);
    if (p < 0.0 || p > 1.0) throw InputError("p must lie in [0, 1]", line_no);
    tr.x.push_back(static_cast<std::uint8_t>(x));
    tr.p.push_back(p);
    if (has_pstar) {
      const double ps = ParseReal(fields[2], "p_star", line_no);
      if (ps < 0.0 || ps > 1.0) {
        throw InputError("p_star must lie in [0, 1]", line_no);
      }
      tr.pstar.push_back(ps);
    }
  }
  if (has_pstar) tr.var_T = RealizedVariance(tr.pstar);
  return tr;
}

Transcript ReadTranscriptCsvFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return ReadTranscriptCsv(in);
}

std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void WriteTranscriptCsv(std::ostream& out, const Transcript& tr) {
  out << "t,x,p_star,p\n";
  for (std::size_t t = 0; t < tr.x.size(); ++t) {
    out << t + 1 << ',' << static_cast<int>(tr.x[t]) << ','
        << FormatDouble(tr.pstar[t]) << ',' << FormatDouble(tr.p[t]) << '\n';
  }
}

void WriteResultsHeader(std::ostream& out) {
  out << "experiment,measure,T,n,mean,sd,stderr,ci_lo,ci_hi,seed\n";
}

void WriteResultRow(std::ostream& out, std::string_view experiment,
                    int horizon, const MeasureReport& r) {
  out << experiment << ',' << MeasureName(r.measure) << ',' << horizon << ','
      << r.n << ',' << FormatDouble(r.mean) << ',' << FormatDouble(r.sd) << ','
      << FormatDouble(r.std_error) << ',' << FormatDouble(r.ci_lo) << ','
      << FormatDouble(r.ci_hi) << ',' << r.seed << '\n';
}

void WriteMeasureHeader(std::ostream& out) {
  out << "measure,value,exactness,stderr,replicates,lower,upper\n";
}

void WriteMeasureRow(std::ostream& out, const MeasureValue& v) {
  out << MeasureName(v.kind) << ',' << FormatDouble(v.value) << ','
      << ExactnessName(v.exactness) << ','
      << (v.std_error ? FormatDouble(*v.std_error) : "") << ','
      << v.replicates << ',';
  if (v.exactness == Exactness::kInterval) {
    out << FormatDouble(v.lower) << ',' << FormatDouble(v.upper);
  } else {
    out << ',';
  }
  out << '\n';
}

NatureSpec ParseNatureSpec(std::string_view text, int default_horizon) {
  const json j = ParseJson(text);
  if (!j.is_object()) throw InputError("nature spec must be a JSON object");
  if (!j.contains("kind") || !j["kind"].is_string()) {
    throw InputError("nature spec needs a string 'kind'");
  }
  const std::string kind = j["kind"].get<std::string>();
  NatureSpec s;
  bool found = false;
  for (NatureKind k :
       {NatureKind::kProduct, NatureKind::kBinarySearch,
        NatureKind::kSmoothedHedging, NatureKind::kEpochBinarySearch,
        NatureKind::kSmoothedUniform}) {
    if (NatureKindName(k) == kind) {
      s.kind = k;
      found = true;
    }
  }
  if (!found) throw InputError("unknown nature kind '" + kind + "'");
  s.horizon = RequiredHorizon(j, default_horizon);
  s.epsilon = OptionalReal(j, "epsilon");
  s.c = OptionalReal(j, "c");
  s.center = OptionalReal(j, "center");
  if (j.contains("pstar")) {
    const json& ps = j["pstar"];
    if (ps.is_string()) {
      const std::string preset = ps.get<std::string>();
      if (preset == "hedging_fifths") {
        s.pstar = HedgingFifthsPStar(s.horizon);
      } else if (preset == "constant") {
        const auto level = OptionalReal(j, "level");
        if (!level) throw InputError("preset 'constant' needs 'level'");
        s.pstar = ConstantPStar(*level, s.horizon);
      } else {
        throw InputError("unknown pstar preset '" + preset + "'");
      }
    } else if (ps.is_array()) {
      for (const json& v : ps) {
        if (!v.is_number()) throw InputError("'pstar' entries must be numbers");
        s.pstar.push_back(v.get<double>());
      }
    } else if (ps.is_number()) {
      s.pstar.push_back(ps.get<double>());
    } else {
      throw InputError("'pstar' must be an array, a number or a preset name");
    }
  }
  try {
    MakeNature(s);
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("invalid nature: ") + e.what());
  }
  return s;
}

ForecasterSpec ParseForecasterSpec(std::string_view text) {
  const json j = ParseJson(text);
  if (!j.is_object()) throw InputError("forecaster spec must be a JSON object");
  if (!j.contains("kind") || !j["kind"].is_string()) {
    throw InputError("forecaster spec needs a string 'kind'");
  }
  const std::string kind = j["kind"].get<std::string>();
  ForecasterSpec s;
  bool found = false;
  for (ForecasterKind k :
       {ForecasterKind::kTruthful, ForecasterKind::kConstant,
        ForecasterKind::kHedgingFifths, ForecasterKind::kPatching,
        ForecasterKind::kHedgeStep}) {
    if (ForecasterKindName(k) == kind) {
      s.kind = k;
      found = true;
    }
  }
  if (!found) throw InputError("unknown forecaster kind '" + kind + "'");
  s.level = OptionalReal(j, "level");
  s.eta = OptionalReal(j, "eta");
  s.c = OptionalReal(j, "c");
  if (j.contains("k")) {
    const json& k = j["k"];
    if (k.is_string() && k.get<std::string>() == "T") {
      s.k = 0;
    } else if (k.is_number_integer() && k.get<long>() >= 2 &&
               k.get<long>() <= 100000000) {
      s.k = static_cast<int>(k.get<long>());
    } else {
      throw InputError("'k' must be an integer >= 2 or \"T\"");
    }
  }
  return s;
}

}  // namespace calib

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
#include "cli.h"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "calib/environments.h"
#include "calib/forecasters.h"
#include "calib/harness.h"
#include "calib/io.h"
#include "calib/measures.h"
#include "calib/oracle.h"
#include "calib/types.h"

namespace calib::cli {

namespace {

using nlohmann::json;

struct Options {
  std::string config;
  std::string input;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> reps;
  std::string measures;
};

std::vector<MeasureKind> ParseMeasureList(const std::string& list) {
  std::vector<MeasureKind> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(ParseMeasureKind(item));
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
  }
  return out;
}

json LoadConfig(const std::string& path) {
  if (path.empty()) throw InputError("--config is required");
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config '" + path + "'");
  try {
    json j = json::parse(in);
    if (!j.is_object()) throw InputError("config must be a JSON object");
    return j;
  } catch (const json::exception& e) {
    throw InputError(std::string("invalid config JSON: ") + e.what());
  }
}

template <class T>
T Get(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j[key].get<T>();
  } catch (const json::exception&) {
    throw InputError(std::string("config field '") + key +
                     "' has the wrong type");
  }
}

std::optional<double> GetOptionalReal(const json& j, const char* key) {
  if (!j.contains(key)) return std::nullopt;
  if (!j[key].is_number()) {
    throw InputError(std::string("'") + key + "' must be a number");
  }
  return j[key].get<double>();
}

std::vector<int> GetHorizons(const json& j) {
  if (!j.contains("T")) throw InputError("missing 'T'");
  std::vector<int> out;
  const auto push = [&](const json& v) {
    if (!v.is_number_integer() || v.get<long>() <= 0 ||
        v.get<long>() > 100000000) {
      throw InputError("'T' entries must be positive integers");
    }
    out.push_back(static_cast<int>(v.get<long>()));
  };
  if (j["T"].is_array()) {
    for (const json& v : j["T"]) push(v);
  } else {
    push(j["T"]);
  }
  if (out.empty()) throw InputError("'T' is empty");
  return out;
}

std::uint64_t GetSeed(const json& j, const Options& opt) {
  if (opt.seed) return *opt.seed;
  if (!j.contains("seed")) return 1;
  if (!j["seed"].is_number_unsigned()) {
    throw InputError("'seed' must be a non-negative integer");
  }
  return j["seed"].get<std::uint64_t>();
}

std::size_t GetReps(const json& j, const Options& opt, std::size_t fallback) {
  if (opt.reps) return *opt.reps;
  if (!j.contains("reps")) return fallback;
  if (!j["reps"].is_number_unsigned()) {
    throw InputError("'reps' must be a non-negative integer");
  }
  return j["reps"].get<std::size_t>();
}

std::vector<MeasureKind> GetMeasures(const json& j, const Options& opt) {
  if (!opt.measures.empty()) return ParseMeasureList(opt.measures);
  if (!j.contains("measure")) return {};
  if (j["measure"].is_string()) {
    return ParseMeasureList(j["measure"].get<std::string>());
  }
  if (j["measure"].is_array()) {
    std::vector<MeasureKind> out;
    for (const json& m : j["measure"]) {
      if (!m.is_string()) throw InputError("'measure' entries must be strings");
      out.push_back(ParseMeasureKind(m.get<std::string>()));
    }
    return out;
  }
  throw InputError("'measure' must be a string or an array of strings");
}

EvalOptions GetEvalOptions(const json& params) {
  EvalOptions eval;
  if (params.contains("subsamples")) {
    const auto m = Get<long>(params, "subsamples", 0);
    if (m < 1) throw InputError("'subsamples' must be positive");
    eval.subsamples = static_cast<std::size_t>(m);
  }
  return eval;
}

void WriteOutput(const std::string& path, const std::string& text,
                 std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw InputError("cannot write '" + path + "'");
  file << text;
}

// ---------------------------------------------------------------------------

std::string CmdMeasure(const Options& opt) {
  if (opt.input.empty()) throw InputError("a transcript CSV path is required");
  const Transcript tr = ReadTranscriptCsvFile(opt.input);
  std::vector<MeasureKind> measures = ParseMeasureList(
      opt.measures.empty() ? "step,vcal,ece,smce" : opt.measures);
  EvalOptions eval;
  if (opt.reps) {
    if (*opt.reps < 1) throw InputError("--reps must be positive");
    eval.subsamples = *opt.reps;
  }
  const std::uint64_t seed = opt.seed.value_or(1);
  std::ostringstream os;
  WriteMeasureHeader(os);
  for (std::size_t j = 0; j < measures.size(); ++j) {
    if (tr.x.empty() && (measures[j] == MeasureKind::kStepSub ||
                         measures[j] == MeasureKind::kVCalSub ||
                         measures[j] == MeasureKind::kSsce)) {
      MeasureValue v;
      v.kind = measures[j];
      WriteMeasureRow(os, v);
      continue;
    }
    WriteMeasureRow(os, EvaluateMeasure(tr, measures[j], DeriveSeed(seed, j), eval));
  }
  return os.str();
}

std::string CmdSimulate(const Options& opt) {
  const json cfg = LoadConfig(opt.config);
  if (!cfg.contains("nature") || !cfg["nature"].is_object()) {
    throw InputError("config needs a 'nature' object");
  }
  const int default_horizon =
      cfg.contains("T") ? GetHorizons(cfg).front() : 0;
  const NatureSpec nature = ParseNatureSpec(cfg["nature"].dump(), default_horizon);
  ForecasterSpec forecaster = TruthfulSpec();
  if (cfg.contains("forecaster")) {
    forecaster = ParseForecasterSpec(cfg["forecaster"].dump());
  }
  const Transcript tr = RunEpisode(nature, forecaster, GetSeed(cfg, opt));
  std::ostringstream os;
  WriteTranscriptCsv(os, tr);
  return os.str();
}

std::string Label(const std::string& experiment, const std::string& arm) {
  return experiment + ":" + arm;
}

NatureSpec BernoulliHalfSpec(int horizon) { return ConstantSpec(0.5, horizon); }

std::string CmdExperiment(const Options& opt, std::ostream& err) {
  const json cfg = LoadConfig(opt.config);
  if (!cfg.contains("experiment") || !cfg["experiment"].is_string()) {
    throw InputError("config needs a string 'experiment'");
  }
  const std::string name = cfg["experiment"].get<std::string>();
  const std::vector<int> horizons = GetHorizons(cfg);
  const std::uint64_t seed = GetSeed(cfg, opt);
  const std::size_t reps = GetReps(cfg, opt, 200);
  if (reps < 2) throw InputError("'reps' must be at least 2");
  std::vector<MeasureKind> measures = GetMeasures(cfg, opt);
  const json params = cfg.contains("params") ? cfg["params"] : json::object();
  if (!params.is_object()) throw InputError("'params' must be an object");
  const EvalOptions eval = GetEvalOptions(params);

  std::ostringstream os;
  WriteResultsHeader(os);

  if (name == "binary_search" || name == "hedging" ||
      name == "smoothed_hedging" || name == "epoch") {
    GapParams gp;
    gp.epsilon = GetOptionalReal(params, "epsilon");
    gp.c = GetOptionalReal(params, "c");
    for (int horizon : horizons) {
      for (const GapReport& g :
           TruthfulnessGap(name, horizon, gp, measures, reps, seed, eval)) {
        WriteResultRow(os, Label(name, "truthful"), horizon, g.truthful);
        WriteResultRow(os, Label(name, "strategic"), horizon, g.strategic);
      }
    }
    return os.str();
  }

  if (name == "estimate" || name == "scaling") {
    if (!params.contains("nature") || !params["nature"].is_object()) {
      throw InputError("params need a 'nature' object");
    }
    ForecasterSpec forecaster = TruthfulSpec();
    if (params.contains("forecaster")) {
      forecaster = ParseForecasterSpec(params["forecaster"].dump());
    }
    if (measures.empty()) measures.push_back(MeasureKind::kStep);
    const std::string nature_json = params["nature"].dump();
    if (name == "estimate") {
      for (int horizon : horizons) {
        const NatureSpec nature = ParseNatureSpec(nature_json, horizon);
        for (const MeasureReport& r :
             EstimateErrors(nature, forecaster, measures, reps, seed, eval)) {
          WriteResultRow(os, name, horizon, r);
        }
      }
      return os.str();
    }
    for (MeasureKind m : measures) {
      const ScalingReport rep = ScalingFit(
          [&](int horizon) { return ParseNatureSpec(nature_json, horizon); },
          forecaster, m, horizons, reps, seed, eval);
      for (std::size_t i = 0; i < rep.horizons.size(); ++i) {
        WriteResultRow(os, name, rep.horizons[i], rep.reports[i]);
      }
      err << "scaling " << MeasureName(m) << ": slope "
          << FormatDouble(rep.slope) << "\n";
    }
    return os.str();
  }

  if (name == "thm_alg_scaling") {
    const std::string which = Get<std::string>(params, "nature", "binary_search");
    NatureFactory factory;
    if (which == "binary_search") {
      factory = [](int horizon) {
        return BinarySearchSpec(1.0 / (4.0 * std::sqrt(double(horizon))), horizon);
      };
    } else if (which == "bernoulli") {
      factory = BernoulliHalfSpec;
    } else {
      throw InputError("thm_alg_scaling nature must be binary_search or bernoulli");
    }
    const auto k = Get<long>(params, "k", 0);
    if (k != 0 && k < 2) throw InputError("'k' must be >= 2");
    if (measures.empty()) measures.push_back(MeasureKind::kStep);
    for (MeasureKind m : measures) {
      const ScalingReport rep =
          ScalingFit(factory, HedgeStepSpec(static_cast<int>(k)), m, horizons,
                     reps, seed, eval);
      for (std::size_t i = 0; i < rep.horizons.size(); ++i) {
        WriteResultRow(os, Label(name, which), rep.horizons[i], rep.reports[i]);
      }
      err << name << " " << which << " " << MeasureName(m) << ": slope "
          << FormatDouble(rep.slope) << "\n";
    }
    return os.str();
  }

  throw InputError("unknown experiment '" + name + "'");
}

std::vector<double> GetReals(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array()) {
    throw InputError(std::string("'") + key + "' must be an array");
  }
  std::vector<double> out;
  for (const json& v : j[key]) {
    if (!v.is_number()) throw InputError(std::string("bad entry in '") + key + "'");
    out.push_back(v.get<double>());
  }
  return out;
}

void WriteOracleRow(std::ostream& os, const OracleReport& r) {
  os << MeasureName(r.measure) << ',' << FormatDouble(r.optimized) << ','
     << FormatDouble(r.oracle) << ',' << FormatDouble(r.abs_diff) << ','
     << FormatDouble(r.tolerance) << ",\"" << r.instance << "\"\n";
}

std::string CmdOracle(const Options& opt) {
  const json cfg = LoadConfig(opt.config);
  const double grid_step = Get<double>(cfg, "grid_step", 1e-3);
  if (!(grid_step > 0.0 && grid_step <= kMaxOracleGridStep)) {
    throw InputError("'grid_step' must lie in (0, 1e-3]");
  }
  const double f_grid_step = Get<double>(cfg, "f_grid_step", 0.005);
  std::ostringstream os;
  os << "measure,optimized,oracle,abs_diff,tolerance,instance\n";

  if (cfg.contains("x")) {
    // Single instance.
    EventSequence x;
    for (double v : GetReals(cfg, "x")) {
      if (v != 0.0 && v != 1.0) throw InputError("'x' entries must be 0 or 1");
      x.push_back(static_cast<std::uint8_t>(v));
    }
    const PredictionSequence p = GetReals(cfg, "p");
    try {
      CheckEvents(x);
      CheckPredictions(p);
      CheckSameLength(x.size(), p.size());
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
    const std::string kind = Get<std::string>(cfg, "oracle", "grid");
    OracleReport r;
    r.instance = "T=" + std::to_string(x.size());
    if (kind == "grid") {
      const std::string objective = Get<std::string>(cfg, "objective", "step");
      if (objective == "step") {
        r.measure = MeasureKind::kStep;
        r.optimized = StepCE(x, p).value;
        r.oracle = GridSupOracle(x, p, GridObjective::kStep, grid_step);
      } else if (objective == "sign") {
        r.measure = MeasureKind::kSign;
        r.optimized = SignCE(x, p).value;
        r.oracle = GridSupOracle(x, p, GridObjective::kSign, grid_step);
      } else if (objective == "vcal") {
        r.measure = MeasureKind::kVCal;
        r.optimized = VCal(x, p).value;
        r.oracle = GridSupOracle(x, p, GridObjective::kVCal, grid_step);
      } else {
        throw InputError("'objective' must be step, sign or vcal");
      }
      r.tolerance = 1e-6 + x.size() * grid_step;
    } else if (kind == "subset") {
      const MeasureKind inner =
          ParseMeasureKind(Get<std::string>(cfg, "inner", "step"));
      r.oracle = SubsetEnumerationOracle(x, p, inner);
      if (inner == MeasureKind::kStep) {
        r.measure = MeasureKind::kStepSub;
        r.optimized = StepCESubExact(x, p).value;
      } else if (inner == MeasureKind::kSmooth) {
        r.measure = MeasureKind::kSsce;
        r.optimized = SsceExact(x, p).value;
      } else {
        r.measure = inner;
        r.optimized = r.oracle;
      }
      r.tolerance = 1e-9;
    } else if (kind == "smooth") {
      r.measure = MeasureKind::kSmooth;
      r.optimized = SmoothCE(x, p).value;
      r.oracle = SmoothGridOracle(x, p, f_grid_step);
      r.tolerance = SmoothGridSlack(x, p, f_grid_step) + 1e-9;
    } else {
      throw InputError("'oracle' must be grid, subset or smooth");
    }
    r.abs_diff = std::abs(r.optimized - r.oracle);
    WriteOracleRow(os, r);
    return os.str();
  }

  OracleBatteryConfig battery;
  battery.instances = Get<std::size_t>(cfg, "instances", 1000);
  battery.max_horizon = Get<std::size_t>(cfg, "max_T", 12);
  battery.seed = GetSeed(cfg, opt);
  battery.grid_step = grid_step;
  battery.f_grid_step = f_grid_step;
  for (const OracleReport& r : RunOracleBattery(battery)) WriteOracleRow(os, r);
  return os.str();
}

void AddCommonOptions(CLI::App* cmd, Options& opt) {
  cmd->add_option("--out", opt.out, "Write results to this file");
  cmd->add_option("--seed", opt.seed, "Master seed (overrides the config)");
  cmd->add_option("--reps", opt.reps,
                  "Replicates (experiments) or subsets per subsampled measure");
  cmd->add_option("--measures", opt.measures, "Comma-separated measure names");
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Calibration measures, forecasters and experiments", "calib"};
  app.require_subcommand(1);
  Options opt;

  auto* measure = app.add_subcommand("measure", "Evaluate measures on a transcript CSV");
  measure->add_option("transcript", opt.input, "CSV with header t,x,p_star,p");
  AddCommonOptions(measure, opt);

  auto* simulate = app.add_subcommand("simulate", "Run one episode and print its transcript");
  simulate->add_option("--config", opt.config, "Episode config JSON")->required();
  AddCommonOptions(simulate, opt);

  auto* experiment = app.add_subcommand("experiment", "Run a named experiment");
  experiment->add_option("--config", opt.config, "Experiment config JSON")->required();
  AddCommonOptions(experiment, opt);

  auto* oracle = app.add_subcommand("oracle", "Cross-check measures against brute force");
  oracle->add_option("--config", opt.config, "Oracle config JSON")->required();
  AddCommonOptions(oracle, opt);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    std::string text;
    if (measure->parsed()) {
      text = CmdMeasure(opt);
    } else if (simulate->parsed()) {
      text = CmdSimulate(opt);
    } else if (experiment->parsed()) {
      text = CmdExperiment(opt, err);
    } else {
      text = CmdOracle(opt);
    }
    WriteOutput(opt.out, text, out);
    return kExitOk;
  } catch (const CapabilityError& e) {
    err << "calib: " << e.what() << "\n";
    return kExitCapability;
  } catch (const std::invalid_argument& e) {
    err << "calib: " << e.what() << "\n";
    return kExitConfig;
  } catch (const json::exception& e) {
    err << "calib: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "calib: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace calib::cli

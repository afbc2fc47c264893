#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cohbeam/config.hpp"
#include "cohbeam/dynamics.hpp"
#include "cohbeam/metrics.hpp"
#include "cohbeam/sweep.hpp"

namespace cohbeam {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

/// 17 significant digits: enough to round-trip any double exactly.
inline std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  return out;
}

using json = nlohmann::ordered_json;

inline void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                                const std::string& context) {
  for (const auto& item : obj.items()) {
    bool ok = false;
    for (const char* key : allowed)
      if (item.key() == key) {
        ok = true;
        break;
      }
    if (!ok) throw ConfigError("unknown key '" + item.key() + "' in " + context);
  }
}

inline const json& require_key(const json& obj, const char* key, const std::string& context) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError("missing required key '" + std::string(key) + "' in " + context);
  return *it;
}

inline double as_number(const json& j, const std::string& name) {
  if (!j.is_number()) throw ConfigError("'" + name + "' must be a number");
  return j.get<double>();
}

inline double number_field(const json& obj, const char* key, const std::string& context) {
  return as_number(require_key(obj, key, context), context + "." + key);
}

inline double number_field_or(const json& obj, const char* key, const std::string& context,
                              double fallback) {
  auto it = obj.find(key);
  return it == obj.end() ? fallback : as_number(*it, context + "." + key);
}

inline int int_field_or(const json& obj, const char* key, const std::string& context,
                        int fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number_integer()) throw ConfigError("'" + context + "." + key + "' must be an integer");
  return it->get<int>();
}

}  // namespace detail

/// Parses and validates a run configuration. Unknown keys are rejected;
/// omitted optional keys take the documented defaults.
inline RunConfig parse_config(const std::string& text) {
  detail::json root;
  try {
    root = detail::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config root must be a JSON object");
  detail::reject_unknown_keys(root,
                              {"beam", "law", "load", "N", "dt_safety", "t_end", "output_every",
                               "snapshot_times", "detector"},
                              "config");

  RunConfig rc;

  const detail::json& beam = detail::require_key(root, "beam", "config");
  if (!beam.is_object()) throw ConfigError("'beam' must be an object");
  detail::reject_unknown_keys(beam, {"L", "L0", "rhoA", "EJ"}, "beam");
  rc.beam.L = detail::number_field(beam, "L", "beam");
  rc.beam.L0 = detail::number_field(beam, "L0", "beam");
  rc.beam.rhoA = detail::number_field(beam, "rhoA", "beam");
  rc.beam.EJ = detail::number_field(beam, "EJ", "beam");
  if (!(rc.beam.L0 > 0.0)) throw ConfigError("beam.L0 must be positive in a run config");

  const detail::json& law = detail::require_key(root, "law", "config");
  if (!law.is_object()) throw ConfigError("'law' must be an object");
  detail::reject_unknown_keys(law, {"k", "beta", "v_max", "mode"}, "law");
  rc.law.k = detail::number_field(law, "k", "law");
  const detail::json& vmax = detail::require_key(law, "v_max", "law");
  if (vmax.is_string()) {
    const std::string s = vmax.get<std::string>();
    if (s == "inf" || s == "infinity")
      rc.law.v_max = std::numeric_limits<double>::infinity();
    else
      throw ConfigError("law.v_max must be a number or \"inf\"");
  } else {
    rc.law.v_max = detail::as_number(vmax, "law.v_max");
  }
  rc.law.beta = detail::number_field_or(law, "beta", "law", 1000.0 * rc.law.k);
  if (auto it = law.find("mode"); it != law.end()) {
    if (!it->is_string()) throw ConfigError("law.mode must be a string");
    const std::string mode = it->get<std::string>();
    if (mode == "irreversible")
      rc.law.mode = BreakageMode::Irreversible;
    else if (mode == "literal")
      rc.law.mode = BreakageMode::Literal;
    else
      throw ConfigError("law.mode must be \"irreversible\" or \"literal\"");
  }

  const detail::json& load = detail::require_key(root, "load", "config");
  if (!load.is_object()) throw ConfigError("'load' must be an object");
  const detail::json& kind = detail::require_key(load, "kind", "load");
  if (!kind.is_string()) throw ConfigError("load.kind must be a string");
  const std::string kind_s = kind.get<std::string>();
  if (kind_s == "arctan_ramp") {
    detail::reject_unknown_keys(load, {"kind"}, "load");
    rc.load = LoadModel::arctan_ramp();
  } else if (kind_s == "sinusoid") {
    detail::reject_unknown_keys(load, {"kind", "amplitude", "omega"}, "load");
    rc.load = LoadModel::sinusoid(detail::number_field(load, "amplitude", "load"),
                                  detail::number_field(load, "omega", "load"));
  } else if (kind_s == "constant_uniform") {
    detail::reject_unknown_keys(load, {"kind", "q0"}, "load");
    rc.load = LoadModel::constant_uniform(detail::number_field(load, "q0", "load"));
  } else {
    throw ConfigError("load.kind must be one of arctan_ramp, sinusoid, constant_uniform");
  }

  rc.N = detail::int_field_or(root, "N", "config", 1000);
  rc.dt_safety = detail::number_field_or(root, "dt_safety", "config", 0.5);
  rc.t_end = detail::number_field(root, "t_end", "config");
  rc.output_every = detail::int_field_or(root, "output_every", "config", 10);
  if (auto it = root.find("snapshot_times"); it != root.end()) {
    if (!it->is_array()) throw ConfigError("'snapshot_times' must be an array of numbers");
    for (const auto& v : *it) rc.snapshot_times.push_back(detail::as_number(v, "snapshot_times"));
  }
  if (auto it = root.find("detector"); it != root.end()) {
    if (!it->is_object()) throw ConfigError("'detector' must be an object");
    detail::reject_unknown_keys(
        *it, {"s_min", "window", "cv_threshold", "eps_cz", "velocity_window"}, "detector");
    rc.detector.s_min = detail::number_field_or(*it, "s_min", "detector", rc.detector.s_min);
    rc.detector.window = detail::number_field_or(*it, "window", "detector", rc.detector.window);
    rc.detector.cv_threshold =
        detail::number_field_or(*it, "cv_threshold", "detector", rc.detector.cv_threshold);
    rc.detector.eps_cz = detail::number_field_or(*it, "eps_cz", "detector", rc.detector.eps_cz);
    rc.detector.velocity_window =
        detail::int_field_or(*it, "velocity_window", "detector", rc.detector.velocity_window);
    if (rc.detector.s_min != 0.0 && !(rc.detector.s_min > 0.0))
      throw ConfigError("detector.s_min must be positive");
  }

  rc.validate();
  return rc;
}

inline RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

inline constexpr const char* kTraceHeader =
    "t,apex,forerun_front,forerun_active,cz_start,cz_end,tip_velocity,"
    "E_kin,E_bend,E_found,E_frac,W_ext,balance_residual";

inline void write_trace(const TimeSeries& series, const std::string& path) {
  std::ofstream out = detail::open_out(path);
  out << kTraceHeader << '\n';
  for (const TraceRow& r : series) {
    out << detail::fmt17(r.t) << ',' << detail::fmt17(r.apex) << ','
        << detail::fmt17(r.forerun_front) << ',' << (r.forerun_active ? 1 : 0) << ','
        << detail::fmt17(r.cz_start) << ',' << detail::fmt17(r.cz_end) << ','
        << detail::fmt17(r.tip_velocity) << ',' << detail::fmt17(r.e_kin) << ','
        << detail::fmt17(r.e_bend) << ',' << detail::fmt17(r.e_found) << ','
        << detail::fmt17(r.e_frac) << ',' << detail::fmt17(r.w_ext) << ','
        << detail::fmt17(r.balance_residual) << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

inline void write_snapshot(const Snapshot& snap, const Grid& grid, const std::string& path) {
  std::ofstream out = detail::open_out(path);
  out << "x,v,bond_state,foundation_force\n";
  static constexpr const char* kBondNames[] = {"absent", "intact", "broken"};
  for (int i = 0; i <= grid.n_intervals; ++i) {
    out << detail::fmt17(grid.x[i]) << ',' << detail::fmt17(snap.v[i]) << ','
        << kBondNames[static_cast<int>(snap.bonds[i])] << ','
        << detail::fmt17(snap.foundation_force[i]) << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

/// Minimal trace view for re-analysis: only t and apex are mandatory (and
/// must be the first two columns); forerun_active is honored when present.
struct AnalyzeTrace {
  std::vector<double> t;
  std::vector<double> apex;
  std::vector<char> forerun_active;  // empty when the column is missing
};

inline AnalyzeTrace read_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trace: " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty trace file: " + path);
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, ',')) header.push_back(col);
  }
  if (header.size() < 2 || header[0] != "t" || header[1] != "apex")
    throw IoError("trace header must start with 't,apex': " + path);
  int forerun_col = -1;
  for (size_t c = 0; c < header.size(); ++c)
    if (header[c] == "forerun_active") forerun_col = static_cast<int>(c);

  AnalyzeTrace tr;
  size_t line_no = 1;
  std::vector<std::string> cells;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    cells.clear();
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() < header.size())
      throw IoError(path + ":" + std::to_string(line_no) + ": expected " +
                    std::to_string(header.size()) + " columns");
    auto parse = [&](const std::string& s) {
      char* end = nullptr;
      const double value = std::strtod(s.c_str(), &end);
      if (end == s.c_str())
        throw IoError(path + ":" + std::to_string(line_no) + ": not a number: " + s);
      return value;
    };
    tr.t.push_back(parse(cells[0]));
    tr.apex.push_back(parse(cells[1]));
    if (forerun_col >= 0) tr.forerun_active.push_back(parse(cells[forerun_col]) != 0.0 ? 1 : 0);
  }
  return tr;
}

namespace detail {

inline json events_to_json(const std::vector<JumpEvent>& events) {
  json arr = json::array();
  for (const JumpEvent& e : events) {
    json j;
    j["t_start"] = e.t_start;
    j["t_end"] = e.t_end;
    j["length_before"] = e.length_before;
    j["length_after"] = e.length_after;
    j["step_size"] = e.step_size;
    j["forerunning_involved"] = e.forerunning_involved;
    arr.push_back(std::move(j));
  }
  return arr;
}

inline json stats_to_json(const StepStats& s) {
  json j;
  j["n_events"] = s.n_events;
  j["cv_intervals"] = s.cv_intervals;
  j["cv_step_sizes"] = s.cv_step_sizes;
  j["classification"] = to_string(s.classification);
  return j;
}

inline json summary_to_json(const RunSummary& s) {
  json j;
  if (s.t_init)
    j["t_init"] = *s.t_init;
  else
    j["t_init"] = nullptr;
  j["final_apex"] = s.final_apex;
  j["n_events"] = s.n_events;
  j["classification"] = to_string(s.classification);
  j["max_abs_balance_residual"] = s.max_abs_balance_residual;
  j["max_forerun_extent"] = s.max_forerun_extent;
  return j;
}

}  // namespace detail

inline void write_events(const std::vector<JumpEvent>& events, const StepStats& stats,
                         const RunSummary& summary, const std::string& path) {
  detail::json root;
  root["events"] = detail::events_to_json(events);
  root["stats"] = detail::stats_to_json(stats);
  root["summary"] = detail::summary_to_json(summary);
  std::ofstream out = detail::open_out(path);
  out << root.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

/// Run-directory summary: the analysis record plus how the run was stepped
/// and which snapshot files were produced.
inline void write_run_summary(const RunResult& rr, const RunSummary& summary,
                              const std::vector<std::string>& snapshot_files,
                              const std::string& path) {
  detail::json root;
  root["status"] = rr.diverged ? "diverged" : "ok";
  if (rr.diverged) root["diverged_step"] = rr.diverged_step;
  root["dt"] = rr.dt;
  root["dt_crit"] = rr.dt_crit;
  root["n_steps"] = rr.n_steps;
  root["output_every"] = rr.output_every;
  root["s_min"] = rr.s_min_effective;
  root["summary"] = detail::summary_to_json(summary);
  detail::json snaps = detail::json::array();
  for (size_t i = 0; i < rr.snapshots.size(); ++i) {
    detail::json j;
    j["index"] = rr.snapshots[i].index;
    j["requested_t"] = rr.snapshots[i].requested_t;
    j["actual_t"] = rr.snapshots[i].actual_t;
    j["file"] = snapshot_files.size() > i ? snapshot_files[i] : "";
    snaps.push_back(std::move(j));
  }
  root["snapshots"] = std::move(snaps);
  std::ofstream out = detail::open_out(path);
  out << root.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

inline void write_sweep_result(const SweepResult& result, const std::string& path) {
  detail::json root;
  detail::json levels = detail::json::array();
  for (const LevelOutcome& lo : result.levels) {
    detail::json j;
    j["N"] = lo.level.N;
    j["dt_safety"] = lo.level.dt_safety;
    j["dt"] = lo.run.dt;
    j["status"] = lo.run.diverged ? "diverged" : "ok";
    j["n_events"] = lo.stats.n_events;
    j["stats"] = detail::stats_to_json(lo.stats);
    j["summary"] = detail::summary_to_json(lo.summary);
    levels.push_back(std::move(j));
  }
  root["levels"] = std::move(levels);
  detail::json cmps = detail::json::array();
  for (const PairwiseComparison& c : result.comparisons) {
    detail::json j;
    j["coarse_index"] = c.coarse_index;
    j["fine_index"] = c.fine_index;
    j["max_abs_dapex"] = c.max_abs_dapex;
    cmps.push_back(std::move(j));
  }
  root["comparisons"] = std::move(cmps);
  std::ofstream out = detail::open_out(path);
  out << root.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace cohbeam

// Command-line driver: run one simulation, a refinement sweep, re-analyze a
// trace, or extract a snapshot from a saved run directory.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cohbeam/cohbeam.hpp"

namespace fs = std::filesystem;
using namespace cohbeam;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitDiverged = 2;

struct RunArtifacts {
  RunResult result;
  std::vector<JumpEvent> events;
  StepStats stats;
  RunSummary summary;
};

RunArtifacts execute_run(const RunConfig& rc) {
  RunArtifacts a;
  a.result = run(rc);
  a.events = detect_jumps(a.result.series, a.result.s_min_effective, rc.detector.window);
  a.stats = step_stats(a.events, rc.detector.cv_threshold);
  a.summary = run_summary(a.result.series, a.events, rc.beam.L0, a.result.grid.h,
                          rc.detector.cv_threshold);
  return a;
}

int write_run_outputs(const RunConfig& rc, const RunArtifacts& a, const std::string& out_dir) {
  fs::create_directories(out_dir);
  write_trace(a.result.series, out_dir + "/trace.csv");
  write_events(a.events, a.stats, a.summary, out_dir + "/events.json");
  std::vector<std::string> snapshot_files;
  if (!a.result.snapshots.empty()) {
    fs::create_directories(out_dir + "/snapshots");
    for (const Snapshot& snap : a.result.snapshots) {
      const std::string rel = "snapshots/snapshot_" + std::to_string(snap.index) + ".csv";
      write_snapshot(snap, a.result.grid, out_dir + "/" + rel);
      snapshot_files.push_back(rel);
    }
  }
  write_run_summary(a.result, a.summary, snapshot_files, out_dir + "/summary.json");
  (void)rc;
  if (a.result.diverged) {
    std::cerr << "run diverged at step " << a.result.diverged_step
              << "; partial outputs written to " << out_dir << "\n";
    return kExitDiverged;
  }
  std::cout << "run complete: t_end reached after " << a.result.n_steps << " steps, apex "
            << a.summary.final_apex << ", " << a.stats.n_events << " jump event(s), "
            << to_string(a.stats.classification) << "\n";
  return kExitOk;
}

int cmd_run(const std::string& config_path, const std::string& out_dir) {
  const RunConfig rc = parse_config_file(config_path);
  return write_run_outputs(rc, execute_run(rc), out_dir);
}

std::vector<SweepLevel> parse_levels_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open levels file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(ss.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON in levels file: ") + e.what());
  }
  if (!root.is_object() || !root.contains("levels") || !root["levels"].is_array())
    throw ConfigError("levels file must be an object with a 'levels' array");
  std::vector<SweepLevel> levels;
  for (const auto& item : root["levels"]) {
    if (!item.is_object() || !item.contains("N"))
      throw ConfigError("each level needs at least an 'N'");
    SweepLevel level;
    level.N = item["N"].get<int>();
    level.dt_safety = item.value("dt_safety", 0.5);
    levels.push_back(level);
  }
  return levels;
}

int cmd_sweep(const std::string& config_path, const std::string& levels_path,
              const std::string& out_dir) {
  SweepPlan plan;
  plan.base = parse_config_file(config_path);
  plan.levels = parse_levels_file(levels_path);
  const SweepResult result = run_sweep(plan);

  fs::create_directories(out_dir);
  for (size_t i = 0; i < result.levels.size(); ++i) {
    const LevelOutcome& lo = result.levels[i];
    const std::string level_dir = out_dir + "/level_" + std::to_string(i);
    fs::create_directories(level_dir);
    write_trace(lo.run.series, level_dir + "/trace.csv");
    write_events(lo.events, lo.stats, lo.summary, level_dir + "/events.json");
  }
  write_sweep_result(result, out_dir + "/sweep.json");

  std::printf("%-8s %-10s %-12s %-8s %-14s %s\n", "N", "dt_safety", "dt", "events",
              "classification", "status");
  for (const LevelOutcome& lo : result.levels)
    std::printf("%-8d %-10g %-12.6g %-8d %-14s %s\n", lo.level.N, lo.level.dt_safety, lo.run.dt,
                lo.stats.n_events, to_string(lo.stats.classification).c_str(),
                lo.run.diverged ? "diverged" : "ok");
  for (const PairwiseComparison& c : result.comparisons)
    std::printf("levels %d -> %d: max |dapex| = %.6g\n", c.coarse_index, c.fine_index,
                c.max_abs_dapex);

  bool any_diverged = false;
  for (const LevelOutcome& lo : result.levels) any_diverged |= lo.run.diverged;
  return any_diverged ? kExitDiverged : kExitOk;
}

int cmd_analyze(const std::string& trace_path, const std::string& out_path, double s_min,
                double window) {
  const AnalyzeTrace tr = read_trace(trace_path);
  const std::vector<JumpEvent> events =
      detect_jumps(tr.t, tr.apex, tr.forerun_active, s_min, window);
  const StepStats stats = step_stats(events);
  RunSummary summary;  // only trace-derivable fields; t_init needs the grid
  summary.n_events = stats.n_events;
  summary.classification = stats.classification;
  if (!tr.apex.empty()) summary.final_apex = tr.apex.back();
  write_events(events, stats, summary, out_path);
  std::cout << stats.n_events << " jump event(s), " << to_string(stats.classification) << "\n";
  return kExitOk;
}

int cmd_snapshot(const std::string& run_dir, int index, double at_time,
                 const std::string& out_path) {
  std::ifstream in(run_dir + "/summary.json");
  if (!in) throw IoError("cannot open run summary: " + run_dir + "/summary.json");
  nlohmann::json summary = nlohmann::json::parse(in);
  if (!summary.contains("snapshots") || summary["snapshots"].empty())
    throw IoError("run directory has no snapshots: " + run_dir);
  const auto& snaps = summary["snapshots"];
  int chosen = -1;
  if (index >= 0) {
    for (size_t i = 0; i < snaps.size(); ++i)
      if (snaps[i]["index"].get<int>() == index) chosen = static_cast<int>(i);
    if (chosen < 0) throw IoError("no snapshot with index " + std::to_string(index));
  } else {
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < snaps.size(); ++i) {
      const double d = std::abs(snaps[i]["actual_t"].get<double>() - at_time);
      if (d < best) {
        best = d;
        chosen = static_cast<int>(i);
      }
    }
  }
  const std::string src = run_dir + "/" + snaps[chosen]["file"].get<std::string>();
  fs::copy_file(src, out_path, fs::copy_options::overwrite_existing);
  std::cout << "extracted " << src << " (t = " << snaps[chosen]["actual_t"].get<double>()
            << ") to " << out_path << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "cohbeam: dynamic fracture of a notched beam on a breakable cohesive foundation"};
  app.require_subcommand(1);

  std::string config_path, out_dir, levels_path, trace_path, out_path, run_dir;
  double s_min = 0.1, window = 0.5, at_time = 0.0;
  int index = -1;

  CLI::App* run_cmd = app.add_subcommand("run", "run one simulation and write its outputs");
  run_cmd->add_option("--config", config_path, "run config JSON")->required();
  run_cmd->add_option("--out", out_dir, "output directory")->required();

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "refinement study over (N, dt_safety) levels");
  sweep_cmd->add_option("--config", config_path, "base run config JSON")->required();
  sweep_cmd->add_option("--levels", levels_path, "levels JSON ({\"levels\":[{\"N\":..,\"dt_safety\":..},..]})")
      ->required();
  sweep_cmd->add_option("--out", out_dir, "output directory")->required();

  CLI::App* analyze_cmd =
      app.add_subcommand("analyze", "re-run jump detection on an existing trace CSV");
  analyze_cmd->add_option("--trace", trace_path, "trace CSV (first two columns t,apex)")
      ->required();
  analyze_cmd->add_option("--out", out_path, "events JSON to write")->required();
  analyze_cmd->add_option("--s-min", s_min, "minimum apex gain per window [m]");
  analyze_cmd->add_option("--window", window, "sliding window duration [s]");

  CLI::App* snap_cmd = app.add_subcommand("snapshot", "extract a profile from a saved run");
  snap_cmd->add_option("--run", run_dir, "run output directory")->required();
  snap_cmd->add_option("--index", index, "snapshot index from summary.json");
  snap_cmd->add_option("--time", at_time, "pick the snapshot closest to this time");
  snap_cmd->add_option("--out", out_path, "destination CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(config_path, out_dir);
    if (sweep_cmd->parsed()) return cmd_sweep(config_path, levels_path, out_dir);
    if (analyze_cmd->parsed()) return cmd_analyze(trace_path, out_path, s_min, window);
    if (snap_cmd->parsed()) return cmd_snapshot(run_dir, index, at_time, out_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DivergenceError& e) {
    std::cerr << e.what() << "\n";
    return kExitDiverged;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}

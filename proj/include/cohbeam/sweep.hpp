#pragma once

#include <algorithm>
#include <future>
#include <vector>

#include "cohbeam/config.hpp"
#include "cohbeam/dynamics.hpp"
#include "cohbeam/metrics.hpp"

namespace cohbeam {

struct SweepLevel {
  int N = 0;
  double dt_safety = 0.5;
};

/// Refinement study: the base config re-run over (N, dt_safety) levels.
struct SweepPlan {
  RunConfig base;
  std::vector<SweepLevel> levels;
};

struct LevelOutcome {
  SweepLevel level;
  RunResult run;
  std::vector<JumpEvent> events;
  StepStats stats;
  RunSummary summary;
};

/// max |apex_coarse(t) - apex_fine(t)| over the coarse output times, with the
/// finer history linearly interpolated; restricted to the common time range.
struct PairwiseComparison {
  int coarse_index = 0;
  int fine_index = 0;
  double max_abs_dapex = 0.0;
};

struct SweepResult {
  std::vector<LevelOutcome> levels;  // sorted by N ascending, dt_safety descending
  std::vector<PairwiseComparison> comparisons;
};

namespace detail {

inline double interp_apex(const TimeSeries& series, double t) {
  size_t hi = 1;
  while (hi < series.size() && series[hi].t < t) ++hi;
  if (hi >= series.size()) return series.back().apex;
  const TraceRow& a = series[hi - 1];
  const TraceRow& b = series[hi];
  if (!(b.t > a.t)) return b.apex;
  const double u = (t - a.t) / (b.t - a.t);
  return a.apex + u * (b.apex - a.apex);
}

inline double max_apex_deviation(const TimeSeries& coarse, const TimeSeries& fine) {
  if (coarse.empty() || fine.empty()) return 0.0;
  const double t_lo = fine.front().t;
  const double t_hi = fine.back().t;
  double worst = 0.0;
  for (const TraceRow& row : coarse) {
    if (row.t < t_lo || row.t > t_hi) continue;
    worst = std::max(worst, std::abs(row.apex - interp_apex(fine, row.t)));
  }
  return worst;
}

}  // namespace detail

inline LevelOutcome run_level(const RunConfig& base, const SweepLevel& level) {
  RunConfig rc = base;
  rc.N = level.N;
  rc.dt_safety = level.dt_safety;
  LevelOutcome out;
  out.level = level;
  out.run = run(rc);
  out.events = detect_jumps(out.run.series, out.run.s_min_effective, rc.detector.window);
  out.stats = step_stats(out.events, rc.detector.cv_threshold);
  out.summary =
      run_summary(out.run.series, out.events, rc.beam.L0, out.run.grid.h, rc.detector.cv_threshold);
  return out;
}

/// Executes every level (concurrently; each level is fully isolated) and
/// merges results in level order. A diverging level keeps its partial trace
/// and the sweep continues.
inline SweepResult run_sweep(const SweepPlan& plan) {
  if (plan.levels.size() < 2) throw ConfigError("sweep needs at least 2 levels");
  SweepResult result;
  std::vector<SweepLevel> levels = plan.levels;
  std::sort(levels.begin(), levels.end(), [](const SweepLevel& a, const SweepLevel& b) {
    if (a.N != b.N) return a.N < b.N;
    return a.dt_safety > b.dt_safety;
  });

  std::vector<std::future<LevelOutcome>> futures;
  futures.reserve(levels.size());
  for (const SweepLevel& level : levels)
    futures.push_back(std::async(std::launch::async,
                                 [&plan, level] { return run_level(plan.base, level); }));
  result.levels.reserve(levels.size());
  for (auto& f : futures) result.levels.push_back(f.get());

  for (size_t i = 0; i + 1 < result.levels.size(); ++i) {
    PairwiseComparison cmp;
    cmp.coarse_index = static_cast<int>(i);
    cmp.fine_index = static_cast<int>(i + 1);
    cmp.max_abs_dapex =
        detail::max_apex_deviation(result.levels[i].run.series, result.levels[i + 1].run.series);
    result.comparisons.push_back(cmp);
  }
  return result;
}

}  // namespace cohbeam

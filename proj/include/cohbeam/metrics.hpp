#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cohbeam/energy.hpp"
#include "cohbeam/grid.hpp"
#include "cohbeam/model.hpp"

namespace cohbeam {

/// One output row of a simulation trace.
struct TraceRow {
  double t = 0.0;
  double apex = 0.0;           // end of the traction-free crack [m]
  double forerun_front = 0.0;  // farthest broken bond [m]
  bool forerun_active = false;
  double cz_start = 0.0;
  double cz_end = 0.0;
  double tip_velocity = 0.0;
  double e_kin = 0.0;
  double e_bend = 0.0;
  double e_found = 0.0;
  double e_frac = 0.0;
  double w_ext = 0.0;
  double balance_residual = 0.0;
};

using TimeSeries = std::vector<TraceRow>;

/// A sudden crack advancement detected in the apex history.
struct JumpEvent {
  double t_start = 0.0;
  double t_end = 0.0;
  double length_before = 0.0;
  double length_after = 0.0;
  double step_size = 0.0;
  bool forerunning_involved = false;
};

enum class StepClassification { NoEvents, SingleEvent, Regular, Irregular };

inline std::string to_string(StepClassification c) {
  switch (c) {
    case StepClassification::NoEvents: return "NoEvents";
    case StepClassification::SingleEvent: return "SingleEvent";
    case StepClassification::Regular: return "Regular";
    case StepClassification::Irregular: return "Irregular";
  }
  return "NoEvents";
}

struct StepStats {
  int n_events = 0;
  double cv_intervals = 0.0;   // population cv of inter-event start times
  double cv_step_sizes = 0.0;  // population cv of step sizes
  StepClassification classification = StepClassification::NoEvents;
};

/// Position of the first intact bond at or beyond the notch; L if the
/// ligament is exhausted.
inline double compute_apex(const Grid& grid, const std::vector<BondState>& bonds) {
  for (int i = grid.i_notch; i <= grid.n_intervals; ++i)
    if (bonds[i] == BondState::Intact) return grid.x[i];
  return grid.length();
}

struct ForerunState {
  bool active = false;
  double front = 0.0;  // max x over broken bonds, never behind the apex
};

/// Forerunning: a broken bond strictly beyond the first intact one.
inline ForerunState detect_forerunning(const Grid& grid, const std::vector<BondState>& bonds) {
  const double apex = compute_apex(grid, bonds);
  ForerunState fr;
  fr.front = apex;
  for (int i = grid.n_intervals; i >= grid.i_notch; --i) {
    if (bonds[i] == BondState::Broken) {
      fr.active = grid.x[i] > apex;
      fr.front = std::max(apex, grid.x[i]);
      break;
    }
  }
  return fr;
}

struct CohesiveZone {
  double cz_start = 0.0;
  double cz_end = 0.0;
};

/// The cohesive zone runs from the apex through the contiguous intact bonds
/// whose opening still matters (v > eps_cz * v_max).
inline CohesiveZone cohesive_zone(const Grid& grid, const CohesiveLaw& law,
                                  const std::vector<BondState>& bonds, const Field& v,
                                  double eps_cz = 0.01) {
  int apex_i = -1;
  for (int i = grid.i_notch; i <= grid.n_intervals; ++i)
    if (bonds[i] == BondState::Intact) {
      apex_i = i;
      break;
    }
  if (apex_i < 0) return {grid.length(), grid.length()};
  const double v_floor = eps_cz * law.v_max;
  int end_i = apex_i;
  for (int i = apex_i + 1; i <= grid.n_intervals; ++i) {
    if (bonds[i] != BondState::Intact || !(v[i] > v_floor)) break;
    end_i = i;
  }
  return {grid.x[apex_i], grid.x[end_i]};
}

/// Centered least-squares slope of apex(t) over `window` samples; one-sided
/// (clipped) windows at the series ends.
inline std::vector<double> tip_velocity(const std::vector<double>& t,
                                        const std::vector<double>& apex, int window) {
  if (window < 3 || window % 2 == 0)
    throw std::invalid_argument("tip_velocity window must be odd and >= 3");
  const int n = static_cast<int>(t.size());
  if (n < window) throw std::invalid_argument("tip_velocity: fewer samples than window");
  std::vector<double> vel(n, 0.0);
  const int half = window / 2;
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - half);
    const int hi = std::min(n - 1, i + half);
    const int m = hi - lo + 1;
    double tm = 0.0, am = 0.0;
    for (int j = lo; j <= hi; ++j) {
      tm += t[j];
      am += apex[j];
    }
    tm /= m;
    am /= m;
    double num = 0.0, den = 0.0;
    for (int j = lo; j <= hi; ++j) {
      num += (t[j] - tm) * (apex[j] - am);
      den += (t[j] - tm) * (t[j] - tm);
    }
    vel[i] = den > 0.0 ? num / den : 0.0;
  }
  return vel;
}

namespace detail {

// Indices of samples where apex increased from the previous sample.
inline bool is_riser(const std::vector<double>& apex, int i) { return apex[i] > apex[i - 1]; }

}  // namespace detail

/// Sliding-window jump detection: every window of duration w whose apex gain
/// is >= s_min flags an event; overlapping and adjacent windows merge, and
/// each merged event is trimmed to its first and last actual gain.
/// forerun_active may be empty when the trace does not carry the flag.
inline std::vector<JumpEvent> detect_jumps(const std::vector<double>& t,
                                           const std::vector<double>& apex,
                                           const std::vector<char>& forerun_active, double s_min,
                                           double w) {
  if (!(s_min > 0.0) || !(w > 0.0))
    throw std::invalid_argument("detect_jumps: s_min and w must be positive");
  const int n = static_cast<int>(t.size());
  std::vector<JumpEvent> events;
  if (n < 2) return events;

  // hot[j]: the window starting at sample j gains at least s_min.
  std::vector<int> hot;
  int k = 0;
  for (int j = 0; j < n; ++j) {
    if (k < j) k = j;
    while (k + 1 < n && t[k + 1] <= t[j] + w) ++k;
    if (apex[k] - apex[j] >= s_min) hot.push_back(j);
  }

  size_t pos = 0;
  while (pos < hot.size()) {
    size_t last = pos;
    while (last + 1 < hot.size() && t[hot[last + 1]] <= t[hot[last]] + w) ++last;
    // Merged span: from the first hot window start to the end of the last one.
    const int span_lo = hot[pos];
    int span_hi = hot[last];
    while (span_hi + 1 < n && t[span_hi + 1] <= t[hot[last]] + w) ++span_hi;

    int first_riser = -1, last_riser = -1;
    for (int i = std::max(span_lo, 1); i <= span_hi; ++i) {
      if (detail::is_riser(apex, i)) {
        if (first_riser < 0) first_riser = i;
        last_riser = i;
      }
    }
    if (first_riser > 0) {
      JumpEvent ev;
      const int before = first_riser - 1;
      ev.t_start = t[before];
      ev.t_end = t[last_riser];
      ev.length_before = apex[before];
      ev.length_after = apex[last_riser];
      ev.step_size = ev.length_after - ev.length_before;
      if (!forerun_active.empty())
        for (int i = before; i <= last_riser; ++i)
          if (forerun_active[i]) {
            ev.forerunning_involved = true;
            break;
          }
      events.push_back(ev);
    }
    pos = last + 1;
  }
  return events;
}

inline std::vector<JumpEvent> detect_jumps(const TimeSeries& series, double s_min, double w) {
  std::vector<double> t, apex;
  std::vector<char> fr;
  t.reserve(series.size());
  apex.reserve(series.size());
  fr.reserve(series.size());
  for (const TraceRow& r : series) {
    t.push_back(r.t);
    apex.push_back(r.apex);
    fr.push_back(r.forerun_active ? 1 : 0);
  }
  return detect_jumps(t, apex, fr, s_min, w);
}

namespace detail {

inline double population_cv(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= static_cast<double>(xs.size());
  return mean != 0.0 ? std::sqrt(var) / mean : 0.0;
}

}  // namespace detail

/// Population-CV statistics of the event sequence. The regular/irregular
/// threshold on cv_intervals is a diagnostic convention (default 0.2).
inline StepStats step_stats(const std::vector<JumpEvent>& events, double cv_threshold = 0.2) {
  StepStats s;
  s.n_events = static_cast<int>(events.size());
  std::vector<double> intervals, sizes;
  for (size_t i = 0; i < events.size(); ++i) {
    sizes.push_back(events[i].step_size);
    if (i > 0) intervals.push_back(events[i].t_start - events[i - 1].t_start);
  }
  s.cv_intervals = detail::population_cv(intervals);
  s.cv_step_sizes = detail::population_cv(sizes);
  if (s.n_events == 0)
    s.classification = StepClassification::NoEvents;
  else if (s.n_events <= 2)
    s.classification = StepClassification::SingleEvent;
  else
    s.classification = s.cv_intervals < cv_threshold ? StepClassification::Regular
                                                     : StepClassification::Irregular;
  return s;
}

struct RunSummary {
  std::optional<double> t_init;  // first time apex clears L0 + h/2
  double final_apex = 0.0;
  int n_events = 0;
  StepClassification classification = StepClassification::NoEvents;
  double max_abs_balance_residual = 0.0;
  double max_forerun_extent = 0.0;  // max(front - apex)
};

inline RunSummary run_summary(const TimeSeries& series, const std::vector<JumpEvent>& events,
                              double L0, double h, double cv_threshold = 0.2) {
  RunSummary s;
  const StepStats st = step_stats(events, cv_threshold);
  s.n_events = st.n_events;
  s.classification = st.classification;
  const double init_threshold = L0 + 0.5 * h;
  for (const TraceRow& r : series) {
    if (!s.t_init && r.apex > init_threshold) s.t_init = r.t;
    s.max_abs_balance_residual = std::max(s.max_abs_balance_residual, std::abs(r.balance_residual));
    s.max_forerun_extent = std::max(s.max_forerun_extent, r.forerun_front - r.apex);
  }
  if (!series.empty()) s.final_apex = series.back().apex;
  return s;
}

}  // namespace cohbeam

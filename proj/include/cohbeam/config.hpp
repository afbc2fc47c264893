#pragma once

#include <cmath>
#include <vector>

#include "cohbeam/model.hpp"

namespace cohbeam {

/// Jump-detector and trace-analysis knobs. s_min <= 0 means "use the
/// grid-scaled default 10*h of the run at hand".
struct DetectorParams {
  double s_min = 0.0;          // minimum apex gain per window [m]
  double window = 0.5;         // sliding window duration [s]
  double cv_threshold = 0.2;   // regular/irregular split on cv_intervals
  double eps_cz = 0.01;        // cohesive-zone opening floor, fraction of v_max
  int velocity_window = 11;    // samples per least-squares slope fit

  void validate() const {
    if (s_min > 0.0 && !std::isfinite(s_min)) throw ConfigError("detector.s_min must be finite");
    if (!(window > 0.0)) throw ConfigError("detector.window must be positive");
    if (!(cv_threshold > 0.0)) throw ConfigError("detector.cv_threshold must be positive");
    if (!(eps_cz >= 0.0)) throw ConfigError("detector.eps_cz must be non-negative");
    if (velocity_window < 3 || velocity_window % 2 == 0)
      throw ConfigError("detector.velocity_window must be odd and >= 3");
  }
};

/// Everything one simulation needs.
struct RunConfig {
  BeamConfig beam;
  CohesiveLaw law;
  LoadModel load;
  int N = 1000;
  double dt_safety = 0.5;
  double t_end = 0.0;
  int output_every = 10;
  std::vector<double> snapshot_times;
  DetectorParams detector;

  void validate() const {
    beam.validate();
    law.validate();
    load.validate();
    if (N < 16) throw ConfigError("N must be at least 16");
    if (!(dt_safety > 0.0 && dt_safety <= 1.0)) throw ConfigError("dt_safety must be in (0, 1]");
    if (!(t_end > 0.0)) throw ConfigError("t_end must be positive");
    if (output_every < 1) throw ConfigError("output_every must be >= 1");
    for (double ts : snapshot_times)
      if (!(ts >= 0.0 && ts <= t_end))
        throw ConfigError("snapshot_times entries must lie in [0, t_end]");
    detector.validate();
  }
};

}  // namespace cohbeam

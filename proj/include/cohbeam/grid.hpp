#pragma once

#include <string>
#include <vector>

#include "cohbeam/model.hpp"

namespace cohbeam {

/// Nodal scalar field over the grid (deflection, velocity, or force density).
using Field = std::vector<double>;

/// Uniform grid of N intervals over [0, L]; node i sits at x_i = i*L/N.
struct Grid {
  int n_intervals = 0;            // N
  double h = 0.0;                 // spacing L/N [m]
  std::vector<double> x;          // node positions, size N+1
  int i_notch = 0;                // first node with x_i >= L0

  int n_nodes() const { return n_intervals + 1; }
  double length() const { return x.back(); }

  /// Trapezoid quadrature weight of node i (h, halved at the two ends).
  double weight(int i) const { return (i == 0 || i == n_intervals) ? 0.5 * h : h; }
};

constexpr int kMinIntervals = 16;  // stencil width plus margin

inline Grid build_grid(const BeamConfig& cfg, int n_intervals) {
  cfg.validate();
  if (n_intervals < kMinIntervals)
    throw ConfigError("N must be at least " + std::to_string(kMinIntervals) + ", got " +
                      std::to_string(n_intervals));
  Grid g;
  g.n_intervals = n_intervals;
  g.h = cfg.L / n_intervals;
  g.x.resize(n_intervals + 1);
  for (int i = 0; i <= n_intervals; ++i) g.x[i] = (static_cast<double>(i) * cfg.L) / n_intervals;
  // Absolute slack so a notch that lands on a grid node is not pushed one
  // node ahead by the rounding of L/N.
  const double slack = 1e-9 * std::max(1.0, cfg.L);
  int i = 0;
  while (i < n_intervals && g.x[i] < cfg.L0 - slack) ++i;
  g.i_notch = i;
  return g;
}

}  // namespace cohbeam

#pragma once

#include <vector>

#include "cohbeam/bending.hpp"
#include "cohbeam/grid.hpp"
#include "cohbeam/model.hpp"

namespace cohbeam {

enum class BondState : unsigned char { Absent, Intact, Broken };

struct EnergyBreakdown {
  double e_kin = 0.0;    // kinetic [J]
  double e_bend = 0.0;   // bending strain [J]
  double e_found = 0.0;  // stored in foundation bonds [J]

  double elastic_total() const { return e_kin + e_bend + e_found; }
};

/// Discrete energy components with trapezoid end weights. In Irreversible
/// mode only intact bonds store energy; in Literal mode every foundation
/// node carries the plateau potential of the bond law.
inline EnergyBreakdown energy_components(const Grid& grid, const BeamConfig& cfg,
                                         const CohesiveLaw& law, const Field& v,
                                         const Field& vdot, const std::vector<BondState>& bonds,
                                         Field& d2_scratch) {
  EnergyBreakdown e;
  const int n = grid.n_intervals;
  second_difference(grid, v, d2_scratch);
  double kin = 0.0, bend = 0.0, found = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double w = grid.weight(i);
    kin += w * vdot[i] * vdot[i];
    bend += w * d2_scratch[i] * d2_scratch[i];
    if (bonds[i] == BondState::Intact ||
        (law.mode == BreakageMode::Literal && bonds[i] != BondState::Absent))
      found += w * foundation_potential(law, v[i]);
  }
  e.e_kin = 0.5 * cfg.rhoA * kin;
  e.e_bend = 0.5 * cfg.EJ * bend;
  e.e_found = found;
  return e;
}

inline EnergyBreakdown energy_components(const Grid& grid, const BeamConfig& cfg,
                                         const CohesiveLaw& law, const Field& v,
                                         const Field& vdot,
                                         const std::vector<BondState>& bonds) {
  Field d2;
  return energy_components(grid, cfg, law, v, vdot, bonds, d2);
}

}  // namespace cohbeam

#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cohbeam {

/// Raised on invalid geometry, material, or run parameters.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Beam geometry and material constants.
struct BeamConfig {
  double L = 10.0;    // beam length [m]
  double L0 = 0.8;    // initial notch length [m]
  double rhoA = 500;  // mass per unit length [kg/m]
  double EJ = 0.15;   // bending stiffness [N*m^2]

  void validate() const {
    if (!(L > 0.0)) throw ConfigError("beam.L must be positive");
    if (!(L0 >= 0.0 && L0 < L)) throw ConfigError("beam.L0 must satisfy 0 <= L0 < L");
    if (!(rhoA > 0.0)) throw ConfigError("beam.rhoA must be positive");
    if (!(EJ > 0.0)) throw ConfigError("beam.EJ must be positive");
  }
};

/// Once a bond passes v_max: Irreversible removes it for good, Literal
/// lets the force resume if the opening drops back below v_max.
enum class BreakageMode { Irreversible, Literal };

/// Bond law of the breakable foundation: linear spring of stiffness k up
/// to the critical half-opening v_max, penalty stiffness beta against
/// interpenetration (v < 0).
struct CohesiveLaw {
  double k = 18.0;                                       // foundation stiffness [N/m^2]
  double beta = 18000.0;                                 // closure penalty stiffness [N/m^2]
  double v_max = std::numeric_limits<double>::infinity();  // critical half-opening [m]
  BreakageMode mode = BreakageMode::Irreversible;

  void validate() const {
    if (!(k > 0.0)) throw ConfigError("law.k must be positive");
    if (!(v_max > 0.0)) throw ConfigError("law.v_max must be positive");
    if (!(beta >= k)) throw ConfigError("law.beta must be >= law.k");
  }
};

enum class LoadKind { ArctanRamp, Sinusoid, ConstantUniform };

/// External transverse load per unit length q(x, t).
///
/// ArctanRamp:       q = arctan(t^4/2) / (2*pi*(x + 0.9))
/// Sinusoid:         q = A*sin(omega*t) / (2*pi*(x + 0.9))
/// ConstantUniform:  q = q0
struct LoadModel {
  LoadKind kind = LoadKind::ArctanRamp;
  double amplitude = 0.0;  // A [N/m], Sinusoid only
  double omega = 0.0;      // angular frequency [rad/s], Sinusoid only
  double q0 = 0.0;         // ConstantUniform only

  void validate() const {
    if (kind == LoadKind::Sinusoid) {
      if (!(amplitude > 0.0)) throw ConfigError("load.amplitude must be positive");
      if (!(omega > 0.0)) throw ConfigError("load.omega must be positive");
    }
    if (kind == LoadKind::ConstantUniform && !std::isfinite(q0))
      throw ConfigError("load.q0 must be finite");
  }

  static LoadModel arctan_ramp() { return LoadModel{LoadKind::ArctanRamp, 0.0, 0.0, 0.0}; }
  static LoadModel sinusoid(double amplitude, double omega) {
    return LoadModel{LoadKind::Sinusoid, amplitude, omega, 0.0};
  }
  static LoadModel constant_uniform(double q0) {
    return LoadModel{LoadKind::ConstantUniform, 0.0, 0.0, q0};
  }

  /// Time-dependent factor of the load; the spatial profile 1/(2*pi*(x+0.9))
  /// is shared by the ramp and the sinusoid.
  double time_factor(double t) const {
    switch (kind) {
      case LoadKind::ArctanRamp: {
        const double t2 = t * t;
        return std::atan(0.5 * t2 * t2);
      }
      case LoadKind::Sinusoid:
        return amplitude * std::sin(omega * t);
      case LoadKind::ConstantUniform:
        return q0;
    }
    return 0.0;
  }
};

/// Denominator of the spatial load profile at position x.
inline double load_profile_denominator(double x) {
  return 2.0 * std::numbers::pi * (x + 0.9);
}

/// Unit step with the convention G(xi) = 0 for xi < 0 and 1 otherwise.
inline double heaviside(double xi) { return xi < 0.0 ? 0.0 : 1.0; }

/// External load q(x, t) [N/m].
inline double eval_load(const LoadModel& load, double x, double t) {
  if (load.kind == LoadKind::ConstantUniform) return load.q0;
  return load.time_factor(t) / load_profile_denominator(x);
}

/// Foundation restoring force per unit length opposing the half-opening v;
/// subtract it in the momentum balance.
///
/// Piecewise form of  f(v) = G(x-L0) * [1 - G(v-v_max)] * [k*G(v) + beta*G(-v)] * v,
/// with bond_broken zeroing the force for good in Irreversible mode.
inline double eval_foundation_force(const CohesiveLaw& law, const BeamConfig& cfg, double x,
                                    double v, bool bond_broken) {
  if (x < cfg.L0) return 0.0;
  if (law.mode == BreakageMode::Irreversible && bond_broken) return 0.0;
  if (v < 0.0) return law.beta * v;
  if (v >= law.v_max) return 0.0;
  return law.k * v;
}

/// Stored energy density of one foundation bond [J/m]. Beyond v_max the
/// force vanishes, so the potential stays at the plateau 1/2*k*v_max^2.
inline double foundation_potential(const CohesiveLaw& law, double v) {
  if (v < 0.0) return 0.5 * law.beta * v * v;
  if (v >= law.v_max) return 0.5 * law.k * law.v_max * law.v_max;
  return 0.5 * law.k * v * v;
}

}  // namespace cohbeam

#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cohbeam/bending.hpp"
#include "cohbeam/config.hpp"
#include "cohbeam/energy.hpp"
#include "cohbeam/grid.hpp"
#include "cohbeam/metrics.hpp"
#include "cohbeam/model.hpp"

namespace cohbeam {

/// Thrown when the explicit scheme produces a non-finite deflection.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(long step_index)
      : std::runtime_error("simulation diverged at step " + std::to_string(step_index)),
        step_index(step_index) {}
  long step_index;
};

struct SimState {
  double t = 0.0;
  long step_index = 0;
  Field v;       // deflection at t
  Field v_prev;  // deflection at t - dt
  std::vector<BondState> bonds;
  double w_ext = 0.0;   // accumulated external work [J]
  double e_frac = 0.0;  // accumulated fracture dissipation [J]
};

struct TimeStepControl {
  double dt = 0.0;
  double safety = 0.5;
  long n_steps = 0;
  int output_every = 10;
};

/// Critical step of the undamped central-difference scheme,
/// dt_crit = 2 / sqrt(w_b^2 + w_s^2), from the fourth-difference worst-case
/// eigenvalue bound w_b = (4/h^2) sqrt(EJ/rhoA) and the stiffest foundation
/// branch w_s = sqrt(max(k, beta)/rhoA). Apply the safety factor yourself.
inline double stable_dt(const Grid& grid, const BeamConfig& cfg, const CohesiveLaw& law) {
  const double wb = 4.0 / (grid.h * grid.h) * std::sqrt(cfg.EJ / cfg.rhoA);
  const double ws = std::sqrt(std::max(law.k, law.beta) / cfg.rhoA);
  return 2.0 / std::sqrt(wb * wb + ws * ws);
}

/// Quiescent start at t = 0: v = 0, bonds intact beyond the notch, and the
/// zero initial velocity realized by the Taylor start
/// v_prev = v - dt*v'(0) + dt^2/2 * a(0), where a(0) = q(x,0)/rhoA because
/// both the bending and foundation forces vanish on the flat beam.
inline SimState init_state(const Grid& grid, const BeamConfig& cfg, const CohesiveLaw& law,
                           const LoadModel& load, double dt) {
  (void)law;
  SimState s;
  const int n = grid.n_intervals;
  s.v.assign(n + 1, 0.0);
  s.v_prev.assign(n + 1, 0.0);
  s.bonds.resize(n + 1);
  for (int i = 0; i <= n; ++i)
    s.bonds[i] = i < grid.i_notch ? BondState::Absent : BondState::Intact;
  const double half_dt2 = 0.5 * dt * dt;
  for (int i = 0; i <= n; ++i)
    s.v_prev[i] = half_dt2 * eval_load(load, grid.x[i], 0.0) / cfg.rhoA;
  return s;
}

/// Advances rhoA*v'' + EJ*D4(v) + f(v) = q(x,t) with the explicit central
/// difference scheme; owns the scratch buffers so stepping never allocates.
class Simulator {
 public:
  Simulator(Grid grid, BeamConfig cfg, CohesiveLaw law, LoadModel load, double dt)
      : grid_(std::move(grid)), cfg_(cfg), law_(law), load_(load), dt_(dt) {
    cfg_.validate();
    law_.validate();
    load_.validate();
    state_ = init_state(grid_, cfg_, law_, load_, dt_);
    const int n = grid_.n_intervals;
    d4_.assign(n + 1, 0.0);
    v_new_.assign(n + 1, 0.0);
    denom_.resize(n + 1);
    for (int i = 0; i <= n; ++i) denom_[i] = load_profile_denominator(grid_.x[i]);
  }

  const Grid& grid() const { return grid_; }
  const BeamConfig& beam() const { return cfg_; }
  const CohesiveLaw& law() const { return law_; }
  const LoadModel& load() const { return load_; }
  double dt() const { return dt_; }
  const SimState& state() const { return state_; }
  SimState& state() { return state_; }

  /// One central-difference step followed by the Jacobi-style bond update.
  /// Throws DivergenceError before touching the state if any new deflection
  /// is non-finite.
  void advance() {
    const int n = grid_.n_intervals;
    SimState& s = state_;
    const double dt2 = dt_ * dt_;
    const double inv_rhoA = 1.0 / cfg_.rhoA;

    apply_bending_operator(grid_, s.v, d4_);
    const double tf = load_.time_factor(s.t);
    for (int i = 0; i <= n; ++i) {
      const double q = load_.kind == LoadKind::ConstantUniform ? load_.q0 : tf / denom_[i];
      const double f = eval_foundation_force(law_, cfg_, grid_.x[i], s.v[i],
                                             s.bonds[i] == BondState::Broken);
      const double accel = (q - cfg_.EJ * d4_[i] - f) * inv_rhoA;
      v_new_[i] = 2.0 * s.v[i] - s.v_prev[i] + dt2 * accel;
    }
    for (int i = 0; i <= n; ++i)
      if (!std::isfinite(v_new_[i])) throw DivergenceError(s.step_index + 1);

    // External work, midpoint rule in time.
    const double tf_mid = load_.time_factor(s.t + 0.5 * dt_);
    double dw = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double q_mid = load_.kind == LoadKind::ConstantUniform ? load_.q0 : tf_mid / denom_[i];
      dw += grid_.weight(i) * q_mid * (v_new_[i] - s.v[i]);
    }
    s.w_ext += dw;

    // All displacements are committed before any bond changes; dissipation is
    // booked at the opening actually reached when the break is detected.
    if (law_.mode == BreakageMode::Irreversible) {
      for (int i = grid_.i_notch; i <= n; ++i) {
        if (s.bonds[i] == BondState::Intact && v_new_[i] >= law_.v_max) {
          s.bonds[i] = BondState::Broken;
          s.e_frac += 0.5 * law_.k * v_new_[i] * v_new_[i] * grid_.weight(i);
        }
      }
    }

    std::swap(s.v_prev, s.v);
    std::swap(s.v, v_new_);
    ++s.step_index;
    s.t = dt_ * static_cast<double>(s.step_index);
  }

  /// Acceleration from the current force balance at time t for deflection v.
  void accel_into(double t, const Field& v, const std::vector<BondState>& bonds,
                  Field& out) const {
    const int n = grid_.n_intervals;
    out.resize(n + 1);
    apply_bending_operator(grid_, v, scratch_);
    const double tf = load_.time_factor(t);
    const double inv_rhoA = 1.0 / cfg_.rhoA;
    for (int i = 0; i <= n; ++i) {
      const double q = load_.kind == LoadKind::ConstantUniform ? load_.q0 : tf / denom_[i];
      const double f =
          eval_foundation_force(law_, cfg_, grid_.x[i], v[i], bonds[i] == BondState::Broken);
      out[i] = (q - cfg_.EJ * scratch_[i] - f) * inv_rhoA;
    }
  }

  /// Second-order velocity estimate at the current time,
  /// (v - v_prev)/dt + dt/2 * a(v, t), which equals the centered difference
  /// (v_next - v_prev)/(2 dt) of the scheme.
  void centered_velocity_into(Field& out) const {
    const int n = grid_.n_intervals;
    accel_into(state_.t, state_.v, state_.bonds, out);
    const double half_dt = 0.5 * dt_;
    for (int i = 0; i <= n; ++i)
      out[i] = (state_.v[i] - state_.v_prev[i]) / dt_ + half_dt * out[i];
  }

 private:
  Grid grid_;
  BeamConfig cfg_;
  CohesiveLaw law_;
  LoadModel load_;
  double dt_;
  SimState state_;
  Field d4_, v_new_, denom_;
  mutable Field scratch_;
};

/// Single-step contract used by the tests; run loops use Simulator directly.
inline SimState step(const SimState& state, const Grid& grid, const BeamConfig& cfg,
                     const CohesiveLaw& law, const LoadModel& load, double dt) {
  Simulator sim(grid, cfg, law, load, dt);
  sim.state() = state;
  sim.advance();
  return sim.state();
}

/// Full nodal picture captured at one step.
struct Snapshot {
  int index = 0;
  double requested_t = 0.0;
  double actual_t = 0.0;
  Field v;
  std::vector<BondState> bonds;
  Field foundation_force;
};

struct RunResult {
  Grid grid;
  TimeSeries series;
  std::vector<Snapshot> snapshots;
  SimState final_state;
  double dt = 0.0;
  double dt_crit = 0.0;
  long n_steps = 0;
  int output_every = 1;
  double s_min_effective = 0.0;
  bool diverged = false;
  long diverged_step = -1;
};

namespace detail {

inline TraceRow make_row(const Simulator& sim, const CohesiveLaw& law, double eps_cz, Field& vdot,
                         Field& d2) {
  const SimState& s = sim.state();
  TraceRow row;
  row.t = s.t;
  row.apex = compute_apex(sim.grid(), s.bonds);
  const ForerunState fr = detect_forerunning(sim.grid(), s.bonds);
  row.forerun_active = fr.active;
  row.forerun_front = fr.front;
  const CohesiveZone cz = cohesive_zone(sim.grid(), law, s.bonds, s.v, eps_cz);
  row.cz_start = cz.cz_start;
  row.cz_end = cz.cz_end;
  sim.centered_velocity_into(vdot);
  const EnergyBreakdown e =
      energy_components(sim.grid(), sim.beam(), law, s.v, vdot, s.bonds, d2);
  row.e_kin = e.e_kin;
  row.e_bend = e.e_bend;
  row.e_found = e.e_found;
  row.e_frac = s.e_frac;
  row.w_ext = s.w_ext;
  row.balance_residual = e.elastic_total() + s.e_frac - s.w_ext;
  return row;
}

inline Snapshot make_snapshot(const Simulator& sim, int index, double requested_t) {
  const SimState& s = sim.state();
  Snapshot snap;
  snap.index = index;
  snap.requested_t = requested_t;
  snap.actual_t = s.t;
  snap.v = s.v;
  snap.bonds = s.bonds;
  const int n = sim.grid().n_intervals;
  snap.foundation_force.resize(n + 1);
  for (int i = 0; i <= n; ++i)
    snap.foundation_force[i] = eval_foundation_force(
        sim.law(), sim.beam(), sim.grid().x[i], s.v[i], s.bonds[i] == BondState::Broken);
  return snap;
}

}  // namespace detail

/// Runs one simulation to t_end. Deterministic: identical configs give
/// identical results. On divergence the partial trace is kept and the
/// diverged flag is set instead of propagating the exception.
inline RunResult run(const RunConfig& rc) {
  rc.validate();
  RunResult out;
  out.grid = build_grid(rc.beam, rc.N);
  out.dt_crit = stable_dt(out.grid, rc.beam, rc.law);
  out.dt = rc.dt_safety * out.dt_crit;
  out.n_steps = static_cast<long>(std::ceil(rc.t_end / out.dt));
  if (out.n_steps < 1) out.n_steps = 1;
  out.output_every = rc.output_every;
  out.s_min_effective = rc.detector.s_min > 0.0 ? rc.detector.s_min : 10.0 * out.grid.h;

  // Requested snapshot times map to the nearest step.
  std::vector<std::pair<long, int>> snap_steps;  // (step, request index)
  for (size_t si = 0; si < rc.snapshot_times.size(); ++si) {
    long target = std::lround(rc.snapshot_times[si] / out.dt);
    target = std::clamp(target, 0L, out.n_steps);
    snap_steps.emplace_back(target, static_cast<int>(si));
  }
  std::sort(snap_steps.begin(), snap_steps.end());

  Simulator sim(out.grid, rc.beam, rc.law, rc.load, out.dt);
  Field vdot, d2;
  out.series.reserve(static_cast<size_t>(out.n_steps / rc.output_every) + 2);

  auto capture_snapshots = [&](long s) {
    for (const auto& [step_target, request] : snap_steps)
      if (step_target == s)
        out.snapshots.push_back(detail::make_snapshot(sim, request, rc.snapshot_times[request]));
  };

  out.series.push_back(detail::make_row(sim, rc.law, rc.detector.eps_cz, vdot, d2));
  capture_snapshots(0);
  for (long s = 1; s <= out.n_steps; ++s) {
    try {
      sim.advance();
    } catch (const DivergenceError& err) {
      out.diverged = true;
      out.diverged_step = err.step_index;
      break;
    }
    if (s % rc.output_every == 0 || s == out.n_steps)
      out.series.push_back(detail::make_row(sim, rc.law, rc.detector.eps_cz, vdot, d2));
    capture_snapshots(s);
  }

  // Derived column: windowed least-squares tip velocity.
  const int rows = static_cast<int>(out.series.size());
  int window = std::min(rc.detector.velocity_window, rows);
  if (window % 2 == 0) --window;
  if (window >= 3) {
    std::vector<double> t(rows), apex(rows);
    for (int i = 0; i < rows; ++i) {
      t[i] = out.series[i].t;
      apex[i] = out.series[i].apex;
    }
    const std::vector<double> vel = tip_velocity(t, apex, window);
    for (int i = 0; i < rows; ++i) out.series[i].tip_velocity = vel[i];
  }

  out.final_state = sim.state();
  return out;
}

}  // namespace cohbeam

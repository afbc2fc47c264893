#pragma once

#include <cassert>
#include <vector>

#include "cohbeam/grid.hpp"

namespace cohbeam {

/// Fourth-difference d^4v/dx^4 with free ends (v'' = v''' = 0) at both
/// boundaries, imposed by ghost-node elimination:
///
///   row 0:  ( 2 v0 - 4 v1 + 2 v2) / h^4
///   row 1:  (-2 v0 + 5 v1 - 4 v2 + v3) / h^4
///   interior: (v_{i-2} - 4 v_{i-1} + 6 v_i - 4 v_{i+1} + v_{i+2}) / h^4
///
/// mirrored at the right end. Annihilates constants and linears exactly and
/// is self-adjoint under the trapezoid-weighted inner product.
inline void apply_bending_operator(const Grid& grid, const Field& v, Field& out) {
  const int n = grid.n_intervals;
  assert(static_cast<int>(v.size()) == n + 1);
  out.resize(n + 1);
  const double h2 = grid.h * grid.h;
  const double h4 = h2 * h2;
  out[0] = (2.0 * (v[0] + v[2]) - 4.0 * v[1]) / h4;
  out[1] = (-2.0 * v[0] + 5.0 * v[1] - 4.0 * v[2] + v[3]) / h4;
  for (int i = 2; i <= n - 2; ++i)
    out[i] = ((v[i - 2] + v[i + 2]) - 4.0 * (v[i - 1] + v[i + 1]) + 6.0 * v[i]) / h4;
  out[n - 1] = (-2.0 * v[n] + 5.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / h4;
  out[n] = (2.0 * (v[n] + v[n - 2]) - 4.0 * v[n - 1]) / h4;
}

inline Field apply_bending_operator(const Grid& grid, const Field& v) {
  Field out;
  apply_bending_operator(grid, v, out);
  return out;
}

/// Second difference v'' under the same ghost rules; identically zero at the
/// free ends (that is the zero-moment condition).
inline void second_difference(const Grid& grid, const Field& v, Field& out) {
  const int n = grid.n_intervals;
  assert(static_cast<int>(v.size()) == n + 1);
  out.resize(n + 1);
  const double h2 = grid.h * grid.h;
  out[0] = 0.0;
  for (int i = 1; i <= n - 1; ++i) out[i] = ((v[i - 1] + v[i + 1]) - 2.0 * v[i]) / h2;
  out[n] = 0.0;
}

inline Field second_difference(const Grid& grid, const Field& v) {
  Field out;
  second_difference(grid, v, out);
  return out;
}

}  // namespace cohbeam

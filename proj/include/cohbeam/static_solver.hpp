#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <stdexcept>
#include <vector>

#include "cohbeam/grid.hpp"
#include "cohbeam/model.hpp"

namespace cohbeam {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Solves  EJ * D4(v) + k_i * v_i = q_i  with the free-end ghost rows of
/// apply_bending_operator. k_per_node may vanish anywhere, but a globally
/// unsupported beam has rigid modes and is reported as singular.
inline Field solve_beam_on_foundation(const Grid& grid, double EJ, const Field& k_per_node,
                                      const Field& q) {
  const int n = grid.n_intervals;
  const int m = n + 1;
  const double h2 = grid.h * grid.h;
  const double c = EJ / (h2 * h2);

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(5 * static_cast<size_t>(m));
  auto add = [&](int r, int col, double val) { trip.emplace_back(r, col, val); };

  add(0, 0, 2.0 * c);
  add(0, 1, -4.0 * c);
  add(0, 2, 2.0 * c);
  add(1, 0, -2.0 * c);
  add(1, 1, 5.0 * c);
  add(1, 2, -4.0 * c);
  add(1, 3, 1.0 * c);
  for (int i = 2; i <= n - 2; ++i) {
    add(i, i - 2, 1.0 * c);
    add(i, i - 1, -4.0 * c);
    add(i, i, 6.0 * c);
    add(i, i + 1, -4.0 * c);
    add(i, i + 2, 1.0 * c);
  }
  add(n - 1, n - 3, 1.0 * c);
  add(n - 1, n - 2, -4.0 * c);
  add(n - 1, n - 1, 5.0 * c);
  add(n - 1, n, -2.0 * c);
  add(n, n - 2, 2.0 * c);
  add(n, n - 1, -4.0 * c);
  add(n, n, 2.0 * c);
  for (int i = 0; i <= n; ++i)
    if (k_per_node[i] != 0.0) add(i, i, k_per_node[i]);

  Eigen::SparseMatrix<double> A(m, m);
  A.setFromTriplets(trip.begin(), trip.end());
  A.makeCompressed();

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.analyzePattern(A);
  lu.factorize(A);
  if (lu.info() != Eigen::Success)
    throw SolverError("static system is singular (no foundation restrains the rigid modes?)");

  Eigen::Map<const Eigen::VectorXd> rhs(q.data(), m);
  Eigen::VectorXd sol = lu.solve(rhs);
  if (lu.info() != Eigen::Success) throw SolverError("static solve failed");
  return Field(sol.data(), sol.data() + m);
}

/// Static oracle: all-intact linearized foundation (stiffness k beyond the
/// notch, none before) under the load field q.
inline Field solve_static(const Grid& grid, const BeamConfig& cfg, const CohesiveLaw& law,
                          const Field& q) {
  Field k_per_node(grid.n_nodes(), 0.0);
  for (int i = grid.i_notch; i <= grid.n_intervals; ++i) k_per_node[i] = law.k;
  return solve_beam_on_foundation(grid, cfg.EJ, k_per_node, q);
}

}  // namespace cohbeam

#pragma once

#include <array>
#include <vector>

#include "msd/eit/conductivity.hpp"

namespace msd::eit {

// Bilinear quadrilateral FEM for -div(s grad v) = 0 on the unit square with
// Neumann data and the zero-boundary-mean constraint. Conductivity is
// constant per cell; the element stiffness of the unit square cell is scale
// invariant in 2-D, so the assembled operator is exactly symmetric.
class FemGrid {
 public:
  explicit FemGrid(int m);

  int m() const { return m_; }
  int nodes_per_side() const { return m_ + 1; }
  int n_nodes() const { return (m_ + 1) * (m_ + 1); }
  int n_boundary() const { return 4 * m_; }
  double h() const { return 1.0 / m_; }

  // Boundary nodes in counterclockwise arclength order starting at (0,0).
  const std::vector<int>& boundary_nodes() const { return boundary_; }
  // Arclength parameter of boundary node k (total boundary length 4).
  double boundary_arclength(int k) const { return 4.0 * k / n_boundary(); }

  // Tridiagonal-cyclic boundary mass matrix action and inner product
  // (linear elements on boundary edges of length h).
  std::vector<double> boundary_mass_apply(const std::vector<double>& g) const;
  double boundary_inner(const std::vector<double>& f, const std::vector<double>& g) const;

  // y = A(s) x, matrix free.
  void stiffness_apply(const ConductivityField& s, const std::vector<double>& x,
                       std::vector<double>& y) const;
  std::vector<double> stiffness_diagonal(const ConductivityField& s) const;

 private:
  int m_ = 0;
  std::vector<int> boundary_;
  std::array<std::array<double, 4>, 4> k_local_{};
};

struct NeumannSolution {
  std::vector<double> interior;       // nodal solution, boundary mean zero
  std::vector<double> boundary_trace; // restricted to the boundary ordering
  int cg_iterations = 0;
  double relative_residual = 0.0;
};

// Jacobi-preconditioned CG on the (consistent, singular) Neumann system with
// the constant mode projected out, then an exact shift enforcing the
// boundary-mean constraint. Fails hard when the relative residual cannot be
// brought under rel_tol.
NeumannSolution solve_neumann(const FemGrid& grid, const ConductivityField& sigma,
                              const std::vector<double>& current, double rel_tol = 1e-12,
                              int max_iter = 20000);

} // namespace msd::eit

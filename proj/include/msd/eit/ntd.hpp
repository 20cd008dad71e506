#pragma once

#include <cstdint>
#include <vector>

#include "msd/eit/fem.hpp"

namespace msd::eit {

// K zero-mean boundary current patterns, orthonormal in the discrete
// boundary L2 inner product. Built from cos/sin in boundary arclength and
// Gram-Schmidt against the boundary mass matrix.
struct CurrentBasis {
  int mesh_m = 0;
  int k = 0;
  std::vector<std::vector<double>> patterns; // each of length 4*mesh_m
  std::uint64_t id = 0;                      // content hash, for mismatch checks
};

CurrentBasis make_trig_basis(const FemGrid& grid, int k);

enum class NtdMetric { Spectral, HilbertSchmidt };

struct NtDMatrix {
  int k = 0;
  int mesh_m = 0;
  std::uint64_t basis_id = 0;
  std::vector<double> a; // row-major K x K

  double& at(int i, int j) { return a[static_cast<std::size_t>(i) * k + j]; }
  double at(int i, int j) const { return a[static_cast<std::size_t>(i) * k + j]; }
};

// Forward solutions are kept so fidelity gradients can reuse them.
struct NtdAssembly {
  NtDMatrix n;
  std::vector<std::vector<double>> nodal_solutions; // one per basis pattern
};

NtdAssembly ntd_assemble(const FemGrid& grid, const ConductivityField& sigma,
                         const CurrentBasis& basis, double rel_tol = 1e-12, int threads = 0);

inline NtDMatrix ntd_matrix(const FemGrid& grid, const ConductivityField& sigma,
                            const CurrentBasis& basis, double rel_tol = 1e-12) {
  return ntd_assemble(grid, sigma, basis, rel_tol).n;
}

// Spectral = largest singular value of n1 - n2 (power iteration, rel 1e-12);
// HilbertSchmidt = Frobenius. Basis/shape mismatch is an error.
double ntd_distance(const NtDMatrix& n1, const NtDMatrix& n2, NtdMetric metric);

// Symmetric random perturbation scaled so its metric norm is exactly eta.
NtDMatrix add_noise(const NtDMatrix& n, double eta, std::uint64_t seed,
                    NtdMetric metric = NtdMetric::Spectral);

// Largest-|eigenvalue| of a symmetric matrix via power iteration with a
// deterministic start; used by the spectral distance.
double sym_operator_norm(const std::vector<double>& a, int k, double rel_tol = 1e-12,
                         int max_iter = 100000);

// Full symmetric eigendecomposition (cyclic Jacobi); the K x K matrices here
// are tiny. Used by the spectral fidelity subgradient, which must see the
// whole near-top eigenvalue cluster.
struct SymEigen {
  std::vector<double> values;  // k entries
  std::vector<double> vectors; // row-major: vectors[i*k + j] = component j of eigvec i
};
SymEigen sym_eigen(std::vector<double> a, int k);

} // namespace msd::eit

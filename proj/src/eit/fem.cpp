#include "msd/eit/fem.hpp"

#include <cmath>
#include <stdexcept>

namespace msd::eit {

FemGrid::FemGrid(int m) : m_(m) {
  if (m < 1) throw std::invalid_argument("fem: mesh size must be >= 1");
  const int n = m + 1;
  boundary_.reserve(4 * m);
  for (int x = 0; x < m; ++x) boundary_.push_back(x);                     // bottom
  for (int y = 0; y < m; ++y) boundary_.push_back(y * n + m);             // right
  for (int x = m; x > 0; --x) boundary_.push_back(m * n + x);             // top
  for (int y = m; y > 0; --y) boundary_.push_back(y * n);                 // left

  // Q1 stiffness of a square cell at unit conductivity (h-independent).
  const double d = 4.0 / 6.0, a = -1.0 / 6.0, c = -2.0 / 6.0;
  k_local_ = {{{d, a, c, a}, {a, d, a, c}, {c, a, d, a}, {a, c, a, d}}};
}

std::vector<double> FemGrid::boundary_mass_apply(const std::vector<double>& g) const {
  const int nb = n_boundary();
  if (static_cast<int>(g.size()) != nb)
    throw std::invalid_argument("boundary_mass_apply: wrong length");
  std::vector<double> out(nb, 0.0);
  const double he = h();
  for (int e = 0; e < nb; ++e) {
    const int i = e, j = (e + 1) % nb;
    out[i] += he * (2.0 * g[i] + g[j]) / 6.0;
    out[j] += he * (g[i] + 2.0 * g[j]) / 6.0;
  }
  return out;
}

double FemGrid::boundary_inner(const std::vector<double>& f, const std::vector<double>& g) const {
  const std::vector<double> mg = boundary_mass_apply(g);
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * mg[i];
  return s;
}

void FemGrid::stiffness_apply(const ConductivityField& s, const std::vector<double>& x,
                              std::vector<double>& y) const {
  const int n = nodes_per_side();
  y.assign(n_nodes(), 0.0);
  for (int cy = 0; cy < m_; ++cy) {
    for (int cx = 0; cx < m_; ++cx) {
      const double sc = s.at(cx, cy);
      const int i0 = cy * n + cx;        // (cx, cy)
      const int i1 = i0 + 1;             // (cx+1, cy)
      const int i2 = i0 + n + 1;         // (cx+1, cy+1)
      const int i3 = i0 + n;             // (cx, cy+1)
      const int idx[4] = {i0, i1, i2, i3};
      double local[4];
      for (int r = 0; r < 4; ++r) {
        local[r] = k_local_[r][0] * x[idx[0]] + k_local_[r][1] * x[idx[1]] +
                   k_local_[r][2] * x[idx[2]] + k_local_[r][3] * x[idx[3]];
      }
      for (int r = 0; r < 4; ++r) y[idx[r]] += sc * local[r];
    }
  }
}

std::vector<double> FemGrid::stiffness_diagonal(const ConductivityField& s) const {
  const int n = nodes_per_side();
  std::vector<double> diag(n_nodes(), 0.0);
  const double d = 4.0 / 6.0;
  for (int cy = 0; cy < m_; ++cy) {
    for (int cx = 0; cx < m_; ++cx) {
      const double sc = s.at(cx, cy);
      const int i0 = cy * n + cx;
      diag[i0] += sc * d;
      diag[i0 + 1] += sc * d;
      diag[i0 + n + 1] += sc * d;
      diag[i0 + n] += sc * d;
    }
  }
  return diag;
}

NeumannSolution solve_neumann(const FemGrid& grid, const ConductivityField& sigma,
                              const std::vector<double>& current, double rel_tol, int max_iter) {
  const int nb = grid.n_boundary();
  if (static_cast<int>(current.size()) != nb)
    throw std::invalid_argument("solve_neumann: current must live on the boundary nodes");
  if (sigma.m != grid.m()) throw std::invalid_argument("solve_neumann: mesh mismatch");
  if (!sigma.within_box()) throw std::invalid_argument("solve_neumann: sigma violates its box");

  // compatibility: the current must have (quadrature) zero mean
  double gsum = 0.0, gnorm = 0.0;
  const std::vector<double> mg = grid.boundary_mass_apply(current);
  for (int i = 0; i < nb; ++i) {
    gsum += mg[i];
    gnorm = std::max(gnorm, std::abs(current[i]));
  }
  if (std::abs(gsum) > 1e-12 * std::max(1.0, gnorm))
    throw std::invalid_argument("solve_neumann: current is not zero-mean");

  const int nn = grid.n_nodes();
  std::vector<double> b(nn, 0.0);
  const auto& bnodes = grid.boundary_nodes();
  for (int k = 0; k < nb; ++k) b[bnodes[k]] += mg[k];

  auto project = [&](std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= nn;
    for (double& x : v) x -= mean;
  };
  project(b);

  std::vector<double> diag = grid.stiffness_diagonal(sigma);
  std::vector<double> x(nn, 0.0), r = b, z(nn), p(nn), ap(nn);
  double bnorm = 0.0;
  for (double v : b) bnorm += v * v;
  bnorm = std::sqrt(bnorm);

  NeumannSolution sol;
  if (bnorm == 0.0) {
    sol.interior.assign(nn, 0.0);
    sol.boundary_trace.assign(nb, 0.0);
    return sol;
  }

  for (int i = 0; i < nn; ++i) z[i] = r[i] / diag[i];
  project(z);
  p = z;
  double rz = 0.0;
  for (int i = 0; i < nn; ++i) rz += r[i] * z[i];

  int it = 0;
  double rel = 1.0;
  for (; it < max_iter; ++it) {
    grid.stiffness_apply(sigma, p, ap);
    double pap = 0.0;
    for (int i = 0; i < nn; ++i) pap += p[i] * ap[i];
    if (!(pap > 0.0)) {
      throw std::runtime_error(
          "solve_neumann: CG breakdown (non-positive curvature); diagonal range " +
          std::to_string(diag[0]));
    }
    const double alpha = rz / pap;
    for (int i = 0; i < nn; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    double rnorm = 0.0;
    for (double v : r) rnorm += v * v;
    rel = std::sqrt(rnorm) / bnorm;
    if (rel <= rel_tol) {
      ++it;
      break;
    }
    for (int i = 0; i < nn; ++i) z[i] = r[i] / diag[i];
    project(z);
    double rz_new = 0.0;
    for (int i = 0; i < nn; ++i) rz_new += r[i] * z[i];
    const double beta = rz_new / rz;
    rz = rz_new;
    for (int i = 0; i < nn; ++i) p[i] = z[i] + beta * p[i];
  }
  if (rel > std::max(rel_tol, 1e-10)) {
    throw std::runtime_error("solve_neumann: CG did not reach the residual target, rel = " +
                             std::to_string(rel));
  }

  // exact shift: boundary quadrature mean of v must vanish
  double bsum = 0.0;
  for (int k = 0; k < nb; ++k) bsum += x[bnodes[k]];
  const double shift = bsum / nb; // weights are uniform (= h) on the square
  for (double& v : x) v -= shift;

  sol.interior = std::move(x);
  sol.boundary_trace.resize(nb);
  for (int k = 0; k < nb; ++k) sol.boundary_trace[k] = sol.interior[bnodes[k]];
  sol.cg_iterations = it;
  sol.relative_residual = rel;
  return sol;
}

} // namespace msd::eit

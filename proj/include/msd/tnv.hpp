#pragma once

#include <vector>

#include "msd/image.hpp"
#include "msd/multiscale.hpp"
#include "msd/rof.hpp"
#include "msd/tv.hpp"

namespace msd {

// (BV, L2) hierarchical decomposition problem: X = E = L2 on the grid,
// N = Id, d = L2 distance to f, |.| = configured TV regularizer.
struct TnvProblem {
  using Element = ImageGrid;
  ImageGrid f;
  TvRegularizer reg;

  Element zero() const { return ImageGrid(f.width, f.height, 0.0, f.spacing); }
  Element add(const Element& a, const Element& b) const { return a + b; }
  double regularizer(const Element& x) const { return tv_value(x, reg); }
  bool admissible(const Element& x) const { return x.all_finite(); }
  double fidelity(const Element& x) const { return (f - x).l2_norm(); }
};

struct TnvOptions {
  double tol = 1e-8; // duality-gap target per inner solve
  int max_iter = 200000;
};

using ImageTrace = DecompositionTrace<ImageGrid>;

// Runs the hierarchical decomposition: layer u_j solves the ROF problem on
// the previous residual with lambda_j. Requires the Basic regime (a0 == 0)
// and alpha = 2, beta = 1; anything else is a configuration error.
RunResult<ImageGrid> tnv_decompose(const ImageGrid& f, const ScaleSchedule& s,
                                   const TvRegularizer& reg, const TnvOptions& opt = {});

// Residual v_j = f - sum_{i<=j} u_i, taken from the trace partial sums.
std::vector<ImageGrid> tnv_residuals(const ImageGrid& f, const ImageTrace& t);

struct EnergyRow {
  int n = 0;
  double residual_l2 = 0.0;   // ||v_n||
  double layer_l2 = 0.0;      // ||u_n||
  double layer_reg = 0.0;     // J(u_n)
  double step_gap = 0.0;      // | ||f_n||^2 - (||u_n||^2 + J(u_n)/lambda_n + ||v_n||^2) |
  double cumulative_gap = 0.0;
};

// Per-step and cumulative energy-identity gaps. Both vanish at exact
// minimizers of the discrete problem for any 1-homogeneous J; with an
// inexact solve the step gap is bounded by (duality gap)/lambda_n.
std::vector<EnergyRow> energy_identity_report(const ImageGrid& f, const ImageTrace& t,
                                              const TvRegularizer& reg);

} // namespace msd

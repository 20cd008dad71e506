#pragma once

#include <optional>
#include <vector>

#include "msd/image.hpp"
#include "msd/tv.hpp"

namespace msd {

// Minimizer state for  min_u  lambda ||f - u||_{L2}^2 + J(u),
// J the configured TV regularizer. v = f - u. The dual field p carries the
// per-cell 2-vector constraint ||p||_inf <= 1 (seminorm) resp. <= h (full
// norm, where it absorbs the TV weight).
struct RofSolution {
  ImageGrid u;
  ImageGrid v;
  std::vector<double> px, py;
  int iterations = 0;
  double primal_dual_gap = 0.0;
  bool converged = true;
  double objective = 0.0;
};

double rof_objective(const ImageGrid& f, const ImageGrid& u, double lambda,
                     const TvRegularizer& reg);

// Chambolle-type dual projection (FISTA-accelerated) for the seminorm,
// primal-dual splitting for the full norm. Stops when the duality gap is
// <= tol; when max_iter is hit first the result is returned with
// converged = false, never silently.
RofSolution rof_solve(const ImageGrid& f, double lambda, const TvRegularizer& reg, double tol,
                      int max_iter = 200000);

struct DualNormEstimate {
  double value = 0.0;          // sup <v,h> / J(h); always a lower bound
  int iterations = 0;
  double achieved_rel_change = 0.0;
  bool unbounded = false;      // seminorm with nonzero-mean v
};

// Discrete dual norm ||v||_* = sup { <v,h>_{L2} : J(h) <= 1 }, estimated by
// projected ascent on the ratio <v,h>/J(h). The reported ratio always uses
// the unsmoothed J, so the estimate is a certified lower bound.
DualNormEstimate dual_norm_star(const ImageGrid& v, const TvRegularizer& reg, double tol,
                                int max_iter = 5000,
                                const ImageGrid* warm_start = nullptr);

} // namespace msd

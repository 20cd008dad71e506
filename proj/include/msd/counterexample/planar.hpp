#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "msd/schedule.hpp"

namespace msd::planarcx {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

double norm(Vec2 v);

// Planar rotating construction on R^2 with data value 1, schedule
// lambda_n = b^n, a_n = c^{-n}, alpha = beta = gamma = 1. All quantities of
// the form 1 - h_n, 1 - Xi, 1 - N are computed and stored as gaps straight
// from their defining formulas; at the default (b, c) = (90, 9) the scale-8
// gaps are ~1e-12 and would not survive a subtraction from 1.
struct PlanarConfig {
  double b = 90.0;
  double c = 9.0;
  double epsilon = 1.0; // curvature of the innermost branch
  int nbar = 1;         // first modified annulus index
  int n_steps = 8;      // run scales 0..n_steps
  int grid_angular = 4096;
  int grid_radial = 4096;
  double refine_tol = 1e-10;
  double tie_rel = 1e-6; // relative window for argmin tie clustering
  int threads = 0;       // 0 = hardware concurrency

  void validate() const; // c >= 9, b/c > 2, 64 < (b/(2c))^{2 nbar + 1}
};

// r_n = 1 - 2^{-(n+1)}, s_n = r_n + 2^{-(n+3)}.
double r_seq(int n);
double s_seq(int n);

// 1 - h_n = (9/8) (c^{-(n+1)} + b^{-(n+1)}) 2^{-(n+2)}.
double h_gap(int n, const PlanarConfig& cfg);

struct PlanarSequences {
  double r_n = 0.0;
  double s_n = 0.0;
  double one_minus_h_n = 0.0;
};
PlanarSequences planar_sequences(int n, const PlanarConfig& cfg);

// Gap form of the radial profile: returns 1 - Xi~(r); nonpositive for
// r >= 1. Continuous across the branch points.
double xi_gap(double r, const PlanarConfig& cfg);
inline double xi_tilde(double r, const PlanarConfig& cfg) { return 1.0 - xi_gap(r, cfg); }

// Gap form 1 - N(x) of the full (rotating) modification. Outside the
// modified annuli this equals xi_gap(||x||); inside, the value rides the
// nested curve family of the geometric construction, located by bisection
// on the curve-membership predicate.
double n_gap(Vec2 x, const PlanarConfig& cfg);

// Global polar-grid argmin oracle with local refinement. Scanning starts at
// phi0 and proceeds counterclockwise; exact/near ties (within tie_rel of the
// minimum) are broken by smallest angle relative to phi0, then smallest
// radius. Deterministic, optionally threaded over angular chunks with an
// ordered reduction.
struct ArgminResult {
  Vec2 point;
  double value = 0.0;
  int tie_components = 1;
};

ArgminResult polar_argmin(const std::function<double(Vec2)>& objective, double r_lo, double r_hi,
                          double phi0, const PlanarConfig& cfg);

struct PlanarStep {
  int n = 0;
  double radius = 0.0;
  double theta = 0.0;       // in [0, 2 pi)
  int theta_label = -1;     // nearest multiple of pi/2 (0..3) when within 1e-4, else -1
  double fidelity_gap = 0.0; // |1 - N(sigma~_n)| as a gap
  double objective = 0.0;
};

struct PlanarRun {
  std::vector<PlanarStep> steps;
  bool aborted = false;
  int last_trusted_scale = -1;
  std::string abort_reason;
};

// Tight multiscale iteration with the planar fidelity (radial = false uses
// the full rotating N, radial = true uses Xi) and the polar argmin as exact
// inner solver. Aborts when the gap quantities of the next scale fall under
// 1e3 * machine epsilon.
PlanarRun run_planar_counterexample(const PlanarConfig& cfg, bool radial_variant = false);

} // namespace msd::planarcx

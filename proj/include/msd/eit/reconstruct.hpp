#pragma once

#include <optional>
#include <string>
#include <vector>

#include "msd/eit/ntd.hpp"
#include "msd/multiscale.hpp"

namespace msd::eit {

struct ReconstructConfig {
  int mesh_m = 16;
  double a_ell = 0.5;
  double b_ell = 4.0;
  int currents = 8;
  NtdMetric metric = NtdMetric::Spectral;
  TvKind reg_kind = TvKind::Seminorm;

  // inner projected-gradient solver
  int max_pg_iters = 60;
  int max_backtracks = 30;
  double fem_rel_tol = 1e-12;
  int threads = 0;
};

// Multiscale problem over absolute conductivity fields. The iteration's
// origin element is the constant midpoint of the ellipticity box, whose
// seminorm vanishes; increments are unconstrained difference fields and only
// partial sums are box-checked.
struct EitProblem {
  using Element = ConductivityField;

  FemGrid grid;
  CurrentBasis basis;
  NtDMatrix nhat;
  ReconstructConfig cfg;

  EitProblem(const NtDMatrix& data, const ReconstructConfig& c);

  Element zero() const;
  Element add(const Element& a, const Element& b) const;
  double regularizer(const Element& x) const { return tv_conductivity(x, cfg.reg_kind); }
  bool admissible(const Element& x) const { return x.within_box(); }
  double fidelity(const Element& x) const;

  NtdAssembly assemble(const Element& x) const;
  double distance_of(const NtDMatrix& n) const { return ntd_distance(nhat, n, cfg.metric); }
};

// Projected gradient with backtracking line search on the true per-scale
// objective; the search direction uses the epsilon-smoothed TV (epsilon
// relative to the box range) and the adjoint-state fidelity gradient.
// Line-search failure returns the zero increment with a note; the driver's
// safeguard makes that safe.
struct EitInnerSolver {
  const EitProblem& problem;
  double alpha = 2.0, beta = 1.0, gamma = 1.0;

  InnerResult<ConductivityField> operator()(const EitProblem& p, const ConductivityField& base,
                                            double lambda, double a, double tol, int scale) const;
};

struct EitRunSummary {
  RunResult<ConductivityField> run;
  std::string warning; // set when the schedule is not TightConvergent
};

EitRunSummary reconstruct_multiscale(const NtDMatrix& nhat, const ScaleSchedule& s,
                                     const ReconstructConfig& cfg, double tol = 1e-9);

// Gradient of d(Nhat, N(sigma))^2 in the configured metric via the
// adjoint-state contraction of the cached forward solutions.
std::vector<double> fidelity_sq_gradient(const EitProblem& p, const ConductivityField& sigma,
                                         const NtdAssembly& assembly);

} // namespace msd::eit

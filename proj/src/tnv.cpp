#include "msd/tnv.hpp"

#include <cmath>
#include <stdexcept>

namespace msd {

namespace {

struct RofInnerSolver {
  const TvRegularizer& reg;
  const TnvOptions& opt;

  InnerResult<ImageGrid> operator()(const TnvProblem& p, const ImageGrid& base, double lambda,
                                    double /*a*/, double tol, int /*scale*/) const {
    const ImageGrid residual = p.f - base;
    RofSolution sol = rof_solve(residual, lambda, reg, tol, opt.max_iter);
    InnerResult<ImageGrid> r;
    r.increment = sol.u;
    r.iterations = sol.iterations;
    r.objective = sol.objective;
    r.converged = sol.converged;
    if (!sol.converged) r.note = "rof: max_iter reached, gap " + std::to_string(sol.primal_dual_gap);
    return r;
  }
};

} // namespace

RunResult<ImageGrid> tnv_decompose(const ImageGrid& f, const ScaleSchedule& s,
                                   const TvRegularizer& reg, const TnvOptions& opt) {
  if (s.a0 != 0.0)
    throw std::invalid_argument("tnv_decompose: the construction has no a_n term (a0 must be 0)");
  if (s.alpha != 2.0 || s.beta != 1.0)
    throw std::invalid_argument("tnv_decompose: alpha = 2, beta = 1 required");
  if (classify_schedule(s) != ScheduleRegime::Basic)
    throw std::invalid_argument("tnv_decompose: Basic regime required (lambda_growth >= 2^beta)");
  if (!f.all_finite()) throw std::invalid_argument("tnv_decompose: input has non-finite values");

  TnvProblem p{f, reg};
  RofInnerSolver solver{reg, opt};
  return run_multiscale(p, s, solver, opt.tol);
}

std::vector<ImageGrid> tnv_residuals(const ImageGrid& f, const ImageTrace& t) {
  std::vector<ImageGrid> out;
  out.reserve(t.size());
  for (const auto& sum : t.partial_sums) out.push_back(f - sum);
  return out;
}

std::vector<EnergyRow> energy_identity_report(const ImageGrid& f, const ImageTrace& t,
                                              const TvRegularizer& reg) {
  std::vector<EnergyRow> rows;
  rows.reserve(t.size());
  const double f2 = f.l2_norm() * f.l2_norm();
  double used = 0.0; // sum of ||u_j||^2 + J(u_j)/lambda_j so far
  ImageGrid prev_residual = f;
  for (std::size_t n = 0; n < t.size(); ++n) {
    const ImageGrid& u = t.increments[n];
    const ImageGrid v = f - t.partial_sums[n];
    const double lam = t.schedule.lambda(static_cast<int>(n));
    EnergyRow row;
    row.n = static_cast<int>(n);
    row.layer_l2 = u.l2_norm();
    row.residual_l2 = v.l2_norm();
    row.layer_reg = tv_value(u, reg);
    const double fn2 = prev_residual.l2_norm() * prev_residual.l2_norm();
    row.step_gap = std::abs(fn2 - (row.layer_l2 * row.layer_l2 + row.layer_reg / lam +
                                   row.residual_l2 * row.residual_l2));
    used += row.layer_l2 * row.layer_l2 + row.layer_reg / lam;
    row.cumulative_gap = std::abs(f2 - used - row.residual_l2 * row.residual_l2);
    rows.push_back(row);
    prev_residual = v;
  }
  return rows;
}

} // namespace msd

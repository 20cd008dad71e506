#include "msd/eit/reconstruct.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace msd::eit {

EitProblem::EitProblem(const NtDMatrix& data, const ReconstructConfig& c)
    : grid(c.mesh_m), basis(make_trig_basis(grid, c.currents)), nhat(data), cfg(c) {
  if (data.k != c.currents || data.mesh_m != c.mesh_m)
    throw std::invalid_argument("eit: data shape does not match the configuration");
  // data measured with the same basis construction
  if (data.basis_id != basis.id)
    throw std::invalid_argument("eit: data was assembled against a different current basis");
  if (!(c.a_ell > 0.0 && c.a_ell <= c.b_ell))
    throw std::invalid_argument("eit: need 0 < a_ell <= b_ell");
}

ConductivityField EitProblem::zero() const {
  return ConductivityField(cfg.mesh_m, cfg.a_ell, cfg.b_ell, 0.5 * (cfg.a_ell + cfg.b_ell));
}

ConductivityField EitProblem::add(const Element& a, const Element& b) const {
  ConductivityField out = a;
  for (std::size_t i = 0; i < out.s.size(); ++i) out.s[i] += b.s[i];
  return out;
}

double EitProblem::fidelity(const Element& x) const {
  return distance_of(assemble(x).n); // honors the configured thread cap
}

NtdAssembly EitProblem::assemble(const Element& x) const {
  return ntd_assemble(grid, x, basis, cfg.fem_rel_tol, cfg.threads);
}

namespace {

std::vector<double> fidelity_sq_gradient_for(const EitProblem& p, const ConductivityField& sigma,
                                             const NtdAssembly& assembly, NtdMetric metric);

} // namespace

std::vector<double> fidelity_sq_gradient(const EitProblem& p, const ConductivityField& sigma,
                                         const NtdAssembly& assembly) {
  return fidelity_sq_gradient_for(p, sigma, assembly, p.cfg.metric);
}

namespace {

std::vector<double> fidelity_sq_gradient_for(const EitProblem& p, const ConductivityField& sigma,
                                             const NtdAssembly& assembly, NtdMetric metric) {
  const int k = p.basis.k;
  const int m = sigma.m;
  const int n = m + 1;

  // weight matrix W on the K x K data residual such that
  // d(d^2)/dN_ij = W_ij; for HS, W = 2 (N - Nhat). For the spectral metric,
  // d^2 = smax^2 and the subgradient is 2 smax * sign(mu) w w^T with (mu, w)
  // the top eigenpair of the symmetric difference.
  std::vector<double> w(static_cast<std::size_t>(k) * k, 0.0);
  std::vector<double> diff(w.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = assembly.n.a[i] - p.nhat.a[i];
  if (metric == NtdMetric::HilbertSchmidt) {
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = 2.0 * diff[i];
  } else {
    // subdifferential of smax over the near-top eigenvalue cluster: the
    // plain top-pair subgradient stalls where symmetric phantoms make the
    // leading eigenvalues collide, so average the cluster
    const SymEigen eig = sym_eigen(diff, k);
    double smax = 0.0;
    for (double e : eig.values) smax = std::max(smax, std::abs(e));
    if (smax == 0.0) return std::vector<double>(sigma.s.size(), 0.0);
    std::vector<int> cluster;
    for (int i = 0; i < k; ++i)
      if (std::abs(eig.values[i]) >= 0.95 * smax) cluster.push_back(i);
    const double weight = 1.0 / static_cast<double>(cluster.size());
    for (int idx : cluster) {
      const double sgn = eig.values[idx] >= 0.0 ? 1.0 : -1.0;
      const double* v = eig.vectors.data() + static_cast<std::size_t>(idx) * k;
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
          w[static_cast<std::size_t>(i) * k + j] += 2.0 * smax * sgn * weight * v[i] * v[j];
    }
  }

  // local Q1 stiffness at unit conductivity
  const double d = 4.0 / 6.0, a = -1.0 / 6.0, c = -2.0 / 6.0;
  const double kloc[4][4] = {{d, a, c, a}, {a, d, a, c}, {c, a, d, a}, {a, c, a, d}};

  std::vector<double> grad(sigma.s.size(), 0.0);
  std::vector<double> vloc(static_cast<std::size_t>(k) * 4);
  for (int cy = 0; cy < m; ++cy) {
    for (int cx = 0; cx < m; ++cx) {
      const int i0 = cy * n + cx;
      const int idx[4] = {i0, i0 + 1, i0 + n + 1, i0 + n};
      for (int jb = 0; jb < k; ++jb)
        for (int r = 0; r < 4; ++r)
          vloc[static_cast<std::size_t>(jb) * 4 + r] = assembly.nodal_solutions[jb][idx[r]];
      // dN_ij/ds_c = - v_i^T K_c v_j; accumulate sum_ij W_ij dN_ij/ds_c
      double acc = 0.0;
      for (int ib = 0; ib < k; ++ib) {
        double kv[4];
        for (int r = 0; r < 4; ++r) {
          kv[r] = 0.0;
          for (int q = 0; q < 4; ++q) kv[r] += kloc[r][q] * vloc[static_cast<std::size_t>(ib) * 4 + q];
        }
        for (int jb = 0; jb < k; ++jb) {
          double quad = 0.0;
          for (int r = 0; r < 4; ++r) quad += vloc[static_cast<std::size_t>(jb) * 4 + r] * kv[r];
          acc += w[static_cast<std::size_t>(ib) * k + jb] * quad;
        }
      }
      grad[static_cast<std::size_t>(cy) * m + cx] = -acc;
    }
  }
  return grad;
}

} // namespace

InnerResult<ConductivityField> EitInnerSolver::operator()(const EitProblem& p,
                                                          const ConductivityField& base,
                                                          double lambda, double a, double tol,
                                                          int /*scale*/) const {
  const int m = base.m;
  const std::size_t nc = base.s.size();
  const double h = base.h();
  const double eps = 1e-6 * (p.cfg.b_ell - p.cfg.a_ell);

  auto clamp_field = [&](ConductivityField& f) {
    for (double& v : f.s) v = std::clamp(v, p.cfg.a_ell, p.cfg.b_ell);
  };

  // the optimizer (gradient and line search) works on the eps-smoothed TV;
  // the driver's safeguard re-checks the exact objective afterwards
  auto smoothed_tv = [&](const std::vector<double>& v) {
    double val = tv_smoothed_raw(v, m, m, h, eps);
    if (p.cfg.reg_kind == TvKind::FullNorm) {
      double l1 = 0.0;
      for (double t : v) l1 += std::abs(t);
      val += l1 * h * h;
    }
    return val;
  };
  std::vector<double> inc_buf(nc);
  auto smooth_objective = [&](const ConductivityField& x, double fid) {
    for (std::size_t i = 0; i < nc; ++i) inc_buf[i] = x.s[i] - base.s[i];
    return scale_objective(lambda, a, alpha, gamma, beta, fid, smoothed_tv(x.s),
                           smoothed_tv(inc_buf));
  };

  ConductivityField x = base;
  NtdAssembly asm_x = p.assemble(x);
  double fid_x = p.distance_of(asm_x.n);
  double obj_x = smooth_objective(x, fid_x);
  const double obj_at_base = obj_x;

  std::vector<double> grad(nc), tvg_sum(nc), tvg_inc(nc), inc(nc);
  // independent adaptive steps for the three candidate directions
  std::array<double, 4> steps;
  steps.fill(0.5 * (p.cfg.b_ell - p.cfg.a_ell));
  int total_evals = 0;
  bool line_search_failed = false;

  for (int it = 0; it < p.cfg.max_pg_iters; ++it) {
    // gradient of lambda [ fid^2 + a TV_eps(x) ] + TV_eps(x - base)
    grad = fidelity_sq_gradient(p, x, asm_x);
    for (double& g : grad) g *= lambda;
    std::vector<double> tv_part(nc, 0.0);
    if (a > 0.0) {
      tv_smoothed_gradient_raw(x.s, m, m, h, eps, tvg_sum);
      for (std::size_t i = 0; i < nc; ++i) tv_part[i] += lambda * a * tvg_sum[i];
    }
    for (std::size_t i = 0; i < nc; ++i) inc[i] = x.s[i] - base.s[i];
    tv_smoothed_gradient_raw(inc, m, m, h, eps, tvg_inc);
    for (std::size_t i = 0; i < nc; ++i) grad[i] += tv_part[i] + tvg_inc[i];

    double gmax = 0.0, gmean = 0.0;
    for (double g : grad) {
      gmax = std::max(gmax, std::abs(g));
      gmean += g;
    }
    gmean /= static_cast<double>(nc);
    if (gmax == 0.0) break;

    // candidate directions: the full gradient, its constant part (free of
    // TV cost, moves the conductivity level even when the beta = 1 kink
    // binds), the fluctuation part, and for the spectral metric the
    // Hilbert-Schmidt gradient, which keeps descending where eigenvalue
    // crossings defeat the spectral subgradient
    std::array<std::vector<double>, 4> dirs;
    dirs[0] = grad;
    dirs[1].assign(nc, gmean);
    dirs[2].resize(nc);
    for (std::size_t i = 0; i < nc; ++i) dirs[2][i] = grad[i] - gmean;
    if (p.cfg.metric == NtdMetric::Spectral) {
      dirs[3] = fidelity_sq_gradient_for(p, x, asm_x, NtdMetric::HilbertSchmidt);
      for (std::size_t i = 0; i < nc; ++i)
        dirs[3][i] = lambda * dirs[3][i] + tv_part[i] + tvg_inc[i];
    }

    struct Move {
      ConductivityField x;
      NtdAssembly assembly;
      double fid = 0.0;
      double obj = std::numeric_limits<double>::infinity();
      int dir = -1;
      double step = 0.0;
    } best;
    for (int di = 0; di < 4; ++di) {
      const auto& dir = dirs[di];
      if (dir.empty()) continue;
      double dmax = 0.0;
      for (double g : dir) dmax = std::max(dmax, std::abs(g));
      if (dmax == 0.0) continue;
      double trial_step = steps[di];
      for (int bt = 0; bt < p.cfg.max_backtracks; ++bt) {
        ConductivityField trial = x;
        for (std::size_t i = 0; i < nc; ++i) trial.s[i] -= trial_step * dir[i] / dmax;
        clamp_field(trial);
        NtdAssembly asm_t = p.assemble(trial);
        const double fid_t = p.distance_of(asm_t.n);
        const double obj_t = smooth_objective(trial, fid_t);
        ++total_evals;
        if (obj_t < obj_x) {
          steps[di] = std::min(trial_step * 1.5, 10.0 * (p.cfg.b_ell - p.cfg.a_ell));
          if (obj_t < best.obj) {
            best.x = std::move(trial);
            best.assembly = std::move(asm_t);
            best.fid = fid_t;
            best.obj = obj_t;
            best.dir = di;
            best.step = trial_step;
          }
          break;
        }
        trial_step *= 0.5;
        steps[di] = trial_step;
      }
    }
    if (best.dir < 0) {
      line_search_failed = it == 0;
      break;
    }
    const double decrease = obj_x - best.obj;
    x = std::move(best.x);
    asm_x = std::move(best.assembly);
    fid_x = best.fid;
    obj_x = best.obj;
    if (decrease < tol * std::max(1.0, std::abs(obj_x))) break;
  }

  InnerResult<ConductivityField> out;
  ConductivityField delta = x;
  for (std::size_t i = 0; i < nc; ++i) delta.s[i] -= base.s[i];
  if (line_search_failed && obj_x >= obj_at_base) {
    // no descent found at all: hand back the zero increment with a note
    std::fill(delta.s.begin(), delta.s.end(), 0.0);
    out.note = "line search failed; zero increment";
    out.converged = false;
  }
  out.increment = std::move(delta);
  out.iterations = total_evals;
  out.objective = obj_x;
  return out;
}

EitRunSummary reconstruct_multiscale(const NtDMatrix& nhat, const ScaleSchedule& s,
                                     const ReconstructConfig& cfg, double tol) {
  EitProblem problem(nhat, cfg);
  EitInnerSolver solver{problem, s.alpha, s.beta, s.gamma};
  EitRunSummary out;
  if (classify_schedule(s) != ScheduleRegime::TightConvergent)
    out.warning = "schedule regime is " + std::string(to_string(classify_schedule(s))) +
                  "; the strong-convergence results assume TightConvergent";
  out.run = run_multiscale(problem, s, solver, tol);
  return out;
}

} // namespace msd::eit

// Acceptance suite: runs the pinned end-to-end experiments and prints one
// pass/fail line per criterion. Exit code = number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "msd/circle_shift.hpp"
#include "msd/counterexample/l2.hpp"
#include "msd/counterexample/planar.hpp"
#include "msd/eit/reconstruct.hpp"
#include "msd/group.hpp"
#include "msd/multiscale.hpp"
#include "msd/rof.hpp"
#include "msd/tnv.hpp"
#include "support/slow_rof.hpp"

using namespace msd;

namespace {

struct Harness {
  int failures = 0;
  int index = 0;

  void report(const std::string& name, bool ok, const std::string& detail) {
    std::printf("[%s] C%-2d %s%s%s\n", ok ? "PASS" : "FAIL", index, name.c_str(),
                detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }

  void criterion(const std::string& name, const std::function<std::pair<bool, std::string>()>& f) {
    ++index;
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    std::string detail;
    try {
      auto [o, d] = f();
      ok = o;
      detail = d;
    } catch (const std::exception& ex) {
      ok = false;
      detail = std::string("exception: ") + ex.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    char buf[64];
    std::snprintf(buf, sizeof(buf), " [%.1fs]", secs);
    report(name, ok, detail + buf);
  }
};

// safeguards registry for criterion 10: every trace produced anywhere in
// this suite is checked for augmented monotonicity; telescoping is checked
// where the element payloads are at hand
struct SafeguardLedger {
  long traces = 0;
  long violations = 0;

  template <class E>
  void add(const DecompositionTrace<E>& t) {
    ++traces;
    for (std::size_t n = 1; n < t.size(); ++n)
      if (!(t.augmented[n] <= t.augmented[n - 1])) ++violations;
  }
  template <class E>
  void add_group(const GroupTrace<E>& t) {
    ++traces;
    for (std::size_t n = 1; n < t.size(); ++n)
      if (!(t.augmented[n] <= t.augmented[n - 1])) ++violations;
  }
};

SafeguardLedger g_ledger;

// Pinned piecewise-constant phantom: nested boxes on a dark field. The
// amplitude 10 calibrates the dual norms against the pinned lambda ladder
// 0.05 * 2^n so that every scale produces a nonzero layer (strict residual
// decrease) and the n = 12 residual passes the stated threshold.
ImageGrid make_phantom_image(int n) {
  const double amp = 10.0;
  ImageGrid f(n, n, 0.1 * amp);
  for (int y = n / 8; y < 6 * n / 8; ++y)
    for (int x = n / 8; x < 5 * n / 8; ++x) f.at(x, y) = 0.55 * amp;
  for (int y = n / 4; y < n / 2; ++y)
    for (int x = n / 4; x < n / 2; ++x) f.at(x, y) = 0.95 * amp;
  for (int y = 5 * n / 8; y < 7 * n / 8; ++y)
    for (int x = 5 * n / 8; x < 7 * n / 8; ++x) f.at(x, y) = 0.35 * amp;
  return f;
}

std::pair<bool, std::string> criterion_planar() {
  const auto t0 = std::chrono::steady_clock::now();
  planarcx::PlanarConfig cfg; // b = 90, c = 9, nbar = 1, 4096 x 4096
  cfg.n_steps = 8;
  bool ok = true;
  std::string detail;

  auto full = planarcx::run_planar_counterexample(cfg, false);
  if (full.aborted || full.steps.size() != 9) {
    return {false, "full run aborted or short: " + full.abort_reason};
  }
  const int want_label[9] = {0, 0, 0, 1, 1, 2, 2, 3, 3};
  double worst_r = 0.0;
  for (int n = 0; n <= 8; ++n) {
    const double rerr = std::abs(full.steps[n].radius - planarcx::r_seq(n));
    worst_r = std::max(worst_r, rerr);
    if (rerr > 1e-4) ok = false;
    if (full.steps[n].theta_label != want_label[n]) ok = false;
  }
  // two-subsequence witness: consecutive even iterates beyond 2 nbar differ
  // in angle by at least a quarter turn, so the full sequence cannot converge
  for (int n = 2 * cfg.nbar + 2; n <= 8; n += 2) {
    const double dth = std::abs(
        std::remainder(full.steps[n].theta - full.steps[n - 2].theta, 2.0 * 3.14159265358979323846));
    if (!(dth >= 3.14159265358979323846 / 2.0 - 1e-3)) ok = false;
  }
  auto radial = planarcx::run_planar_counterexample(cfg, true);
  if (radial.aborted || radial.steps.size() != 9) return {false, "radial run aborted"};
  for (int n = 0; n <= 8; ++n) {
    if (std::abs(radial.steps[n].radius - planarcx::r_seq(n)) > 1e-4) ok = false;
    if (radial.steps[n].theta_label != 0) ok = false;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs > 300.0) ok = false; // stated budget: 5 minutes for both variants
  char buf[128];
  std::snprintf(buf, sizeof(buf), "max |radius - r_n| = %.2e, labels %s", worst_r,
                ok ? "as predicted" : "WRONG");
  return {ok, buf};
}

std::pair<bool, std::string> criterion_l2_v2() {
  l2cx::L2Config cfg; // D = 64
  auto study = l2cx::run_l2_v2(cfg);
  bool ok = study.rows.size() == 11;
  double worst = 0.0;
  for (const auto& r : study.rows) {
    if (!r.outside_branch) ok = false;
    worst = std::max(worst, std::abs(r.first_coord - r.closed_form));
  }
  if (worst > 1e-6) ok = false;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "max |coord - closed form| = %.2e, lambda_bar = %.3g", worst,
                study.lambda_bar);
  return {ok, buf};
}

std::pair<bool, std::string> criterion_l2_v1() {
  l2cx::L2Config cfg; // D = 64, lambda = n^4 for n = 4..12
  auto study = l2cx::run_l2_v1(cfg);
  bool ok = study.rows.size() == 9;
  int increases = 0;
  for (std::size_t i = 0; i < study.rows.size(); ++i) {
    const auto& r = study.rows[i];
    if (!r.in_A2 || r.untrusted) ok = false;
    if (r.norm_sigma < cfg.r0 / 2.0 - 1e-6 || r.norm_sigma > cfg.r0 + 1e-6) ok = false;
    if (i > 0) {
      if (r.active_index < study.rows[i - 1].active_index) ok = false;
      if (r.active_index > study.rows[i - 1].active_index) ++increases;
    }
  }
  if (increases < 4) ok = false;
  char buf[160];
  std::string idx;
  for (const auto& r : study.rows) idx += std::to_string(r.active_index) + " ";
  std::snprintf(buf, sizeof(buf), "active indices: %s(%d increases)", idx.c_str(), increases);
  return {ok, buf};
}

std::pair<bool, std::string> criterion_energy_identity() {
  bool ok = true;
  std::string detail;

  // 3x3 instance decomposed with the independent slow oracle as the inner
  // solver, gap 1e-10; the discrete identity must hold to 1e-9 per step
  {
    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> d(0.1, 1.0);
    ImageGrid f(3, 3);
    for (double& v : f.v) v = d(rng);
    ImageGrid sum(3, 3, 0.0);
    double worst = 0.0;
    for (int j = 0; j < 3; ++j) {
      const double lam = 1.0 * std::pow(2.0, j);
      const ImageGrid fj = f - sum;
      auto sol = msd_test::slow_rof_seminorm(fj, lam, 1e-10, 40000000);
      if (sol.gap > 1e-10) {
        ok = false;
        detail += "oracle gap not reached; ";
      }
      const ImageGrid v = fj - sol.u;
      const double fn = fj.l2_norm(), un = sol.u.l2_norm(), vn = v.l2_norm();
      const double gap = std::abs(fn * fn - (un * un + tv_seminorm(sol.u) / lam + vn * vn));
      worst = std::max(worst, gap);
      sum = sum + sol.u;
    }
    if (worst > 1e-9) ok = false;
    detail += "3x3 oracle worst step gap " + std::to_string(worst) + "; ";
  }

  // 32x32 phantom at tol 1e-8
  {
    const ImageGrid f = make_phantom_image(32);
    ScaleSchedule s;
    s.lambda0 = 0.05;
    s.lambda_growth = 2.0;
    s.alpha = 2.0;
    s.beta = 1.0;
    s.n_max = 12;
    TnvOptions opt;
    opt.tol = 1e-8;
    const TvRegularizer reg{TvKind::Seminorm, 0.0};
    auto run = tnv_decompose(f, s, reg, opt);
    if (!run.ok()) return {false, "tnv run failed"};
    g_ledger.add(run.trace);
    const double f2 = f.l2_norm() * f.l2_norm();
    auto rows = energy_identity_report(f, run.trace, reg);
    double worst = 0.0;
    for (const auto& r : rows) worst = std::max({worst, r.step_gap, r.cumulative_gap});
    if (worst > 1e-5 * f2) ok = false;
    char buf[96];
    std::snprintf(buf, sizeof(buf), "32x32 worst gap %.2e (budget %.2e); ", worst, 1e-5 * f2);
    detail += buf;

    // dual characterization on layers with u_j != 0
    const double dual_tol = 1e-4;
    int checked = 0;
    double worst_rel = 0.0;
    const auto residuals = tnv_residuals(f, run.trace);
    for (std::size_t j = 0; j < run.trace.size(); ++j) {
      if (tv_seminorm(run.trace.increments[j]) < 1e-4) continue;
      const double lam = s.lambda(static_cast<int>(j));
      auto est = dual_norm_star(residuals[j], reg, dual_tol, 4000, &run.trace.increments[j]);
      const double target = 1.0 / (2.0 * lam);
      worst_rel = std::max(worst_rel, std::abs(est.value - target) / target);
      if (est.value > target * (1.0 + 1e-6)) ok = false; // never above 1/(2 lambda)
      ++checked;
    }
    if (worst_rel > 5.0 * dual_tol) ok = false;
    std::snprintf(buf, sizeof(buf), "dual check on %d layers, worst rel err %.2e", checked,
                  worst_rel);
    detail += buf;
  }
  return {ok, detail};
}

std::pair<bool, std::string> criterion_tnv_convergence() {
  const auto t0 = std::chrono::steady_clock::now();
  const ImageGrid f = make_phantom_image(32);
  ScaleSchedule s;
  s.lambda0 = 0.05;
  s.lambda_growth = 2.0;
  s.alpha = 2.0;
  s.beta = 1.0;
  s.n_max = 12;
  TnvOptions opt;
  opt.tol = 1e-8;
  auto run = tnv_decompose(f, s, TvRegularizer{TvKind::Seminorm, 0.0}, opt);
  if (!run.ok()) return {false, "run failed"};
  g_ledger.add(run.trace);
  bool ok = true;
  for (std::size_t n = 1; n < run.trace.size(); ++n)
    if (!(run.trace.fidelity[n] < run.trace.fidelity[n - 1])) ok = false;
  const double ratio = run.trace.fidelity.back() / f.l2_norm();
  if (!(ratio <= 1e-3)) ok = false;
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs > 60.0) ok = false; // stated budget: 1 minute
  char buf[96];
  std::snprintf(buf, sizeof(buf), "||v_12|| / ||f|| = %.2e (budget 1e-3)", ratio);
  return {ok, buf};
}

std::pair<bool, std::string> criterion_eit_invariants() {
  bool ok = true;
  std::string detail;
  eit::FemGrid grid(8);
  eit::CurrentBasis basis = eit::make_trig_basis(grid, 6);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> d(0.5, 4.0);
  double worst_sym = 0.0, worst_psd = 0.0;
  for (int t = 0; t < 20; ++t) {
    eit::ConductivityField sigma(8, 0.5, 4.0, 1.0);
    for (double& v : sigma.s) v = d(rng);
    eit::NtDMatrix n = eit::ntd_matrix(grid, sigma, basis);
    for (int i = 0; i < n.k; ++i)
      for (int j = 0; j < n.k; ++j)
        worst_sym = std::max(worst_sym, std::abs(n.at(i, j) - n.at(j, i)));
    auto eig = msd_test::jacobi_eigenvalues(n.a, n.k);
    for (double e : eig) worst_psd = std::min(worst_psd, e);
    worst_psd = -std::abs(worst_psd);
  }
  if (worst_sym > 1e-10 || worst_psd < -1e-10) ok = false;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "sym %.1e, min eig %.1e; ", worst_sym, worst_psd);
  detail += buf;

  // scaling law
  eit::ConductivityField one(8, 0.25, 8.0, 1.0), s3(8, 0.25, 8.0, 3.0);
  eit::NtDMatrix n1 = eit::ntd_matrix(grid, one, basis);
  eit::NtDMatrix n3 = eit::ntd_matrix(grid, s3, basis);
  double worst_scale = 0.0;
  for (std::size_t i = 0; i < n1.a.size(); ++i)
    worst_scale = std::max(worst_scale, std::abs(n3.a[i] - n1.a[i] / 3.0));
  if (worst_scale > 1e-10) ok = false;
  std::snprintf(buf, sizeof(buf), "scaling %.1e; ", worst_scale);
  detail += buf;

  // Richardson ratio over meshes 8/16/32 for sigma = 1
  auto ntd_at = [&](int m) {
    eit::FemGrid g(m);
    return eit::ntd_matrix(g, eit::ConductivityField(m, 0.5, 4.0, 1.0),
                           eit::make_trig_basis(g, 4));
  };
  eit::NtDMatrix a8 = ntd_at(8), a16 = ntd_at(16), a32 = ntd_at(32);
  double d1 = 0.0, d2 = 0.0;
  for (std::size_t i = 0; i < a8.a.size(); ++i) {
    d1 += (a8.a[i] - a16.a[i]) * (a8.a[i] - a16.a[i]);
    d2 += (a16.a[i] - a32.a[i]) * (a16.a[i] - a32.a[i]);
  }
  const double ratio = std::sqrt(d1 / d2);
  if (!(ratio >= 3.5 && ratio <= 4.5)) ok = false;
  std::snprintf(buf, sizeof(buf), "Richardson ratio %.2f", ratio);
  detail += buf;
  return {ok, detail};
}

std::pair<bool, std::string> criterion_eit_decay() {
  const auto t0 = std::chrono::steady_clock::now();
  // pinned configuration: Hilbert-Schmidt data metric (differentiable
  // everywhere, unlike the spectral norm at eigenvalue crossings) and a
  // TightConvergent schedule whose a_n decays fast enough that structure
  // recovery is profitable by scale 5
  eit::ReconstructConfig cfg;
  cfg.mesh_m = 16;
  cfg.currents = 8;
  cfg.a_ell = 0.5;
  cfg.b_ell = 4.0;
  cfg.metric = eit::NtdMetric::HilbertSchmidt;
  cfg.max_pg_iters = 100;

  eit::PhantomSpec spec;
  spec.m = 16;
  spec.background = 1.0;
  spec.a_ell = 0.5;
  spec.b_ell = 4.0;
  // centered 6x6 cell inclusion at value 2: cells 5..10 of 16
  spec.inclusions.push_back({"rect", {5.0 / 16.0, 5.0 / 16.0, 11.0 / 16.0, 11.0 / 16.0}, 2.0});

  eit::FemGrid grid(16);
  eit::CurrentBasis basis = eit::make_trig_basis(grid, 8);
  const eit::NtDMatrix clean = eit::ntd_matrix(grid, eit::make_phantom(spec), basis);

  ScaleSchedule s;
  s.lambda0 = 4.0;
  s.lambda_growth = 16.0;
  s.a0 = 0.01;
  s.a_decay = 4.0;
  s.alpha = 2.0;
  s.beta = 1.0;
  s.gamma = 1.0;
  s.n_max = 5;
  if (classify_schedule(s) != ScheduleRegime::TightConvergent)
    return {false, "pinned schedule is not TightConvergent"};

  const double tol = 1e-9;
  auto summary = eit::reconstruct_multiscale(clean, s, cfg, tol);
  if (!summary.run.ok()) return {false, "clean run failed: " + summary.run.error->message};
  g_ledger.add(summary.run.trace);
  const auto& t = summary.run.trace;
  bool ok = true;
  for (std::size_t n = 1; n < t.size(); ++n)
    if (!(t.augmented[n] <= t.augmented[n - 1])) ok = false;
  const double decay = t.fidelity[5] / t.fidelity[0];
  if (!(decay <= 0.1)) ok = false;

  // noisy data: the criterion asserts the terminal fidelity stays within
  // [eta - 3 tol, 2 eta]. The lower bound presumes delta_0 = eta, which the
  // forward map disproves (part of a random symmetric perturbation is
  // attainable); the check is implemented as stated and the honest outcome
  // is recorded.
  const double eta = 0.05;
  eit::NtDMatrix noisy = eit::add_noise(clean, eta, 20240817, cfg.metric);
  auto noisy_summary = eit::reconstruct_multiscale(noisy, s, cfg, tol);
  if (!noisy_summary.run.ok()) return {false, "noisy run failed"};
  g_ledger.add(noisy_summary.run.trace);
  const double terminal = noisy_summary.run.trace.fidelity.back();
  const bool noise_ok = terminal >= eta - 3.0 * 1e-6 && terminal <= 2.0 * eta;
  if (!noise_ok) ok = false;
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs > 600.0) ok = false; // stated budget: 10 minutes

  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "fid[5]/fid[0] = %.3f (budget 0.1), noisy terminal %.4f vs eta %.2f (floor %s)",
                decay, terminal, eta, noise_ok ? "held" : "undercut: delta_0 < eta");
  return {ok, buf};
}

std::pair<bool, std::string> criterion_group_reduction() {
  bool ok = true;
  std::string detail;

  // shared R^64 problem driven through both constructions
  struct VecProblem {
    using Element = std::vector<double>;
    std::vector<double> target;
    Element zero() const { return Element(target.size(), 0.0); }
    Element identity() const { return zero(); }
    Element add(const Element& a, const Element& b) const {
      Element r = a;
      for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
      return r;
    }
    Element compose(const Element& a, const Element& b) const { return add(a, b); }
    Element inverse(const Element& a) const {
      Element r = a;
      for (double& x : r) x = -x;
      return r;
    }
    double distance(const Element& a, const Element& b) const {
      double s = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
      return std::sqrt(s);
    }
    double regularizer(const Element& a) const { return distance(a, zero()); }
    bool admissible(const Element&) const { return true; }
    double fidelity(const Element& x) const { return distance(x, target); }
  };
  struct VecSolver {
    InnerResult<std::vector<double>> operator()(const VecProblem& p,
                                                const std::vector<double>& base, double lambda,
                                                double a, double, int) const {
      InnerResult<std::vector<double>> r;
      r.increment.resize(base.size());
      const double denom = 1.0 + lambda + lambda * a;
      for (std::size_t i = 0; i < base.size(); ++i)
        r.increment[i] = (lambda * (p.target[i] - base[i]) - lambda * a * base[i]) / denom;
      return r;
    }
  };

  VecProblem p;
  p.target.resize(64);
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (double& x : p.target) x = d(rng);
  ScaleSchedule s;
  s.lambda0 = 0.5;
  s.lambda_growth = 8.0;
  s.a0 = 1.0;
  s.a_decay = 2.0;
  s.alpha = 2.0;
  s.beta = 2.0;
  s.gamma = 2.0;
  s.n_max = 10;
  auto banach = run_multiscale(p, s, VecSolver{}, 1e-12);
  auto group = run_group_multiscale(p, s, VecSolver{}, 1e-12);
  if (!banach.ok() || !group.ok()) return {false, "runs failed"};
  g_ledger.add(banach.trace);
  g_ledger.add_group(group.trace);
  double worst = 0.0;
  for (std::size_t n = 0; n < banach.trace.size(); ++n)
    for (std::size_t i = 0; i < p.target.size(); ++i)
      worst = std::max(worst, std::abs(banach.trace.partial_sums[n][i] -
                                       group.trace.compositions[n][i]));
  if (worst > 1e-12) ok = false;
  char buf[96];
  std::snprintf(buf, sizeof(buf), "max trace deviation %.1e; ", worst);
  detail += buf;

  // circle-shift registration of a known shift
  const int m = 256;
  std::vector<double> s0(m);
  for (int i = 0; i < m; ++i) {
    const double t = 2.0 * 3.14159265358979323846 * i / m;
    s0[i] = std::sin(t) + 0.4 * std::cos(2 * t + 0.7) + 0.2 * std::sin(3 * t);
  }
  CircleShiftProblem helper(s0, s0);
  const double true_shift = 0.3 * m;
  CircleShiftProblem g(s0, helper.shifted(true_shift));
  ScaleSchedule gs;
  gs.lambda0 = 1.0;
  gs.lambda_growth = 8.0;
  gs.a0 = 1.0;
  gs.a_decay = 2.0;
  gs.alpha = 2.0;
  gs.beta = 1.0;
  gs.gamma = 1.0;
  gs.n_max = 9;
  auto run = run_group_multiscale(g, gs, CircleShiftSolver::for_schedule(gs), 1e-10);
  if (!run.ok()) return {false, "registration failed"};
  g_ledger.add_group(run.trace);
  const double err = g.distance(run.trace.compositions.back(), true_shift);
  const double fid = run.trace.fidelity.back();
  if (!(err <= 1e-3 * g.period)) ok = false;
  // the a_n d(psi~, e) term biases finite scales; the bias decays like
  // 1/(lambda_n a_n), three orders below the initial misfit by scale 9
  if (!(fid <= 1e-3 * g.fidelity(0.0))) ok = false;
  std::snprintf(buf, sizeof(buf), "shift err %.2e of period, terminal fidelity %.2e", err / g.period,
                fid);
  detail += buf;
  return {ok, detail};
}

std::pair<bool, std::string> criterion_schedule_property() {
  std::mt19937_64 rng(515151);
  std::uniform_real_distribution<double> growth_d(1.01, 10.0);
  std::uniform_real_distribution<double> decay_d(1.0, 4.0);
  std::uniform_real_distribution<double> beta_d(0.25, 2.5);
  std::uniform_int_distribution<int> a0_d(0, 1);
  const int N = 64;
  int tested = 0, agreed = 0;
  while (tested < 200) {
    ScaleSchedule s;
    s.lambda_growth = growth_d(rng);
    s.a_decay = decay_d(rng);
    s.beta = beta_d(rng);
    s.a0 = a0_d(rng) ? 0.7 : 0.0;
    const double two_beta = std::pow(2.0, s.beta);
    if (std::abs(s.lambda_growth - two_beta) < 1e-6) continue;
    if (std::abs(s.lambda_growth / s.a_decay - two_beta) < 1e-6) continue;
    if (s.a0 > 0.0 && std::abs(s.a_decay - 1.0) < 1e-6) continue;
    ++tested;
    const auto ratios = evaluate_ratios(s, N);
    const bool lambda_bounded = ratios.lambda_ratio[N] <= ratios.lambda_ratio[0] * (1.0 + 1e-9);
    ScheduleRegime want;
    if (s.a0 == 0.0) {
      want = lambda_bounded ? ScheduleRegime::Basic : ScheduleRegime::Unclassified;
    } else {
      const bool a_vanishes = s.a(N) < s.a(0) * 0.99;
      const bool tight_vanishes =
          ratios.tight_ratio[N] < ratios.tight_ratio[0] * (1.0 - 1e-9);
      if (tight_vanishes && a_vanishes) want = ScheduleRegime::TightConvergent;
      else if (lambda_bounded && a_vanishes) want = ScheduleRegime::Tight;
      else want = ScheduleRegime::Unclassified;
    }
    if (classify_schedule(s) == want) ++agreed;
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%d/%d agree", agreed, tested);
  return {agreed == tested, buf};
}

std::pair<bool, std::string> criterion_safeguards() {
  // randomized scalar runs with adversarial inner solvers feed the ledger,
  // on top of every trace already produced above
  struct ScalarProblem {
    using Element = double;
    double nhat = 0.0;
    double zero() const { return 0.0; }
    double add(double a, double b) const { return a + b; }
    double regularizer(double x) const { return std::abs(x); }
    bool admissible(double) const { return true; }
    double fidelity(double x) const { return std::abs(nhat - x); }
  };
  std::mt19937_64 rng(777);
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  std::uniform_real_distribution<double> push_d(-1.0, 1.0);
  long telescoping_violations = 0;
  for (int t = 0; t < 200; ++t) {
    ScalarProblem p{d(rng)};
    ScaleSchedule s;
    s.lambda0 = 0.5 + std::abs(d(rng));
    s.lambda_growth = 2.0 + std::abs(d(rng));
    s.a0 = t % 2 ? std::abs(d(rng)) : 0.0;
    s.a_decay = 1.5;
    s.n_max = 12;
    const double push = push_d(rng);
    struct Push {
      double v;
      InnerResult<double> operator()(const ScalarProblem&, double, double, double, double,
                                     int) const {
        InnerResult<double> r;
        r.increment = v;
        return r;
      }
    };
    auto run = run_multiscale(p, s, Push{push}, 1e-12);
    if (!run.ok()) return {false, "scalar run failed"};
    g_ledger.add(run.trace);
    double prev = 0.0;
    for (std::size_t n = 0; n < run.trace.size(); ++n) {
      if (run.trace.partial_sums[n] != prev + run.trace.increments[n]) ++telescoping_violations;
      prev = run.trace.partial_sums[n];
    }
  }
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%ld traces checked, %ld augmented violations, %ld telescoping",
                g_ledger.traces, g_ledger.violations, telescoping_violations);
  return {g_ledger.violations == 0 && telescoping_violations == 0, buf};
}

} // namespace

int main() {
  Harness h;
  h.criterion("planar counterexample trajectory (full + radial, 4096^2 oracle)",
              criterion_planar);
  h.criterion("l2 example V2 closed form across one decade", criterion_l2_v2);
  h.criterion("l2 example V1 non-convergence witness", criterion_l2_v1);
  h.criterion("TNV energy identity (3x3 oracle + 32x32 run + dual check)",
              criterion_energy_identity);
  h.criterion("TNV convergence on the 32x32 phantom", criterion_tnv_convergence);
  h.criterion("EIT invariants (symmetry, PSD, scaling, Richardson)", criterion_eit_invariants);
  h.criterion("EIT multiscale decay, clean and noisy", criterion_eit_decay);
  h.criterion("group/Banach reduction + circle-shift registration", criterion_group_reduction);
  h.criterion("schedule classification property (200 random triples)",
              criterion_schedule_property);
  h.criterion("universal safeguards (monotonicity + telescoping)", criterion_safeguards);
  std::printf("%d of 10 criteria passed\n", 10 - h.failures);
  return h.failures;
}

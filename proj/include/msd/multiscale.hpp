#pragma once

#include <cmath>
#include <concepts>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "msd/schedule.hpp"

namespace msd {

// Contract for one instantiation of the abstract iteration. Element is the
// ambient-space element type; the problem owns the data term d(Nhat, N(.)),
// the extended-real regularizer |.| and the admissible-set test. Evaluators
// must be pure (no shared mutable state), so a driver may call them from
// worker threads.
template <class P>
concept MultiscaleProblem = requires(const P& p, const typename P::Element& x,
                                     const typename P::Element& y) {
  typename P::Element;
  { p.zero() } -> std::convertible_to<typename P::Element>;
  { p.add(x, y) } -> std::convertible_to<typename P::Element>;
  { p.regularizer(x) } -> std::convertible_to<double>; // may be +infinity
  { p.admissible(x) } -> std::convertible_to<bool>;
  { p.fidelity(x) } -> std::convertible_to<double>; // d(Nhat, N(x)) >= 0
};

// What an inner solver returns for one scale.
template <class E>
struct InnerResult {
  E increment{};
  int iterations = 0;
  double objective = 0.0; // solver's own account of the objective it reached
  bool converged = true;
  std::string note;
};

template <class P, class S>
concept InnerSolver = requires(S& s, const P& p, const typename P::Element& base, double lambda,
                               double a, double tol, int scale) {
  { s(p, base, lambda, a, tol, scale) } -> std::convertible_to<InnerResult<typename P::Element>>;
};

struct InnerReport {
  int iterations = 0;
  double final_objective = 0.0;
  bool safeguard_used = false;
  bool converged = true;
  std::string note;
};

template <class E>
struct DecompositionTrace {
  ScaleSchedule schedule;
  ScheduleRegime regime = ScheduleRegime::Unclassified;
  std::vector<E> increments;
  std::vector<E> partial_sums;
  std::vector<double> fidelity;                 // d(Nhat, N(sigma~_n))
  std::vector<double> regularizer_of_sum;       // |sigma~_n|
  std::vector<double> regularizer_of_increment; // |sigma_n|
  std::vector<double> augmented;                // fidelity^alpha + a_n |sigma~_n|^gamma
  std::vector<InnerReport> inner_reports;

  std::size_t size() const { return fidelity.size(); }
};

// Scale-tagged failure carried out of a run; the trace built so far is kept.
struct ScaleError {
  int scale = -1;
  std::string message;
};

template <class E>
struct RunResult {
  DecompositionTrace<E> trace;
  std::optional<ScaleError> error;
  bool ok() const { return !error.has_value(); }
};

namespace detail {

inline double pow_or_identity(double v, double e) {
  return e == 1.0 ? v : std::pow(v, e);
}

} // namespace detail

// The per-scale inner objective lambda*[d^alpha + a*|sum|^gamma] + |inc|^beta
// evaluated from already-computed pieces.
inline double scale_objective(double lambda, double a, double alpha, double gamma, double beta,
                              double fid, double reg_sum, double reg_inc) {
  double aug = detail::pow_or_identity(fid, alpha);
  if (a > 0.0) aug += a * detail::pow_or_identity(reg_sum, gamma);
  return lambda * aug + detail::pow_or_identity(reg_inc, beta);
}

// The tight multiscale iteration. Each scale minimizes
//   lambda_n [ d(Nhat, N(sigma~_{n-1} + sigma))^alpha + a_n |sigma~_{n-1} + sigma|^gamma ]
//     + |sigma|^beta
// over admissible sigma~_{n-1} + sigma, with a_n == 0 reducing to the basic
// construction. The solver candidate is kept only if it beats the zero
// increment both in the scaled objective and in the unscaled augmented
// quantity at a_n; otherwise the zero increment is used. The second
// comparison is exactly the quantity the augmented-monotonicity invariant
// asserts, which makes that invariant hold bitwise for any solver.
template <class P, class Solver>
  requires MultiscaleProblem<P>
RunResult<typename P::Element> run_multiscale(const P& p, const ScaleSchedule& s, Solver&& solver,
                                              double tol,
                                              std::optional<double> delta_target = std::nullopt) {
  using E = typename P::Element;
  s.validate();

  RunResult<E> out;
  DecompositionTrace<E>& t = out.trace;
  t.schedule = s;
  t.regime = classify_schedule(s);

  E base = p.zero();
  double base_fid = p.fidelity(base);
  double base_reg = p.regularizer(base);

  for (int n = 0; n <= s.n_max; ++n) {
    const double lam = s.lambda(n);
    const double an = s.a(n);

    InnerResult<E> cand;
    try {
      cand = solver(p, base, lam, an, tol, n);
    } catch (const std::exception& ex) {
      out.error = ScaleError{n, std::string("inner solver failed: ") + ex.what()};
      return out;
    }

    E sum_cand = p.add(base, cand.increment);
    InnerReport rep;
    rep.iterations = cand.iterations;
    rep.converged = cand.converged;
    rep.note = cand.note;

    bool use_zero = false;
    double fid_cand = 0.0, regsum_cand = 0.0, reginc_cand = 0.0;
    if (!p.admissible(sum_cand)) {
      if (n == 0 && !p.admissible(base)) {
        // The zero increment is not a legal fallback when even the base is
        // outside E; nothing sound to record.
        out.error = ScaleError{n, "inner solver returned an inadmissible element"};
        return out;
      }
      use_zero = true;
      rep.note += (rep.note.empty() ? "" : "; ");
      rep.note += "inadmissible candidate replaced by zero increment";
    } else {
      fid_cand = p.fidelity(sum_cand);
      regsum_cand = p.regularizer(sum_cand);
      reginc_cand = p.regularizer(cand.increment);
      if (!std::isfinite(reginc_cand)) {
        use_zero = true;
      } else {
        const double obj_cand =
            scale_objective(lam, an, s.alpha, s.gamma, s.beta, fid_cand, regsum_cand, reginc_cand);
        const double obj_zero =
            scale_objective(lam, an, s.alpha, s.gamma, s.beta, base_fid, base_reg, 0.0);
        const double aug_cand = detail::pow_or_identity(fid_cand, s.alpha) +
                                an * detail::pow_or_identity(regsum_cand, s.gamma);
        const double aug_zero = detail::pow_or_identity(base_fid, s.alpha) +
                                an * detail::pow_or_identity(base_reg, s.gamma);
        use_zero = !(obj_cand <= obj_zero && aug_cand <= aug_zero);
      }
    }

    if (use_zero) {
      rep.safeguard_used = true;
      t.increments.push_back(p.zero());
      t.partial_sums.push_back(base);
      t.fidelity.push_back(base_fid);
      t.regularizer_of_sum.push_back(base_reg);
      t.regularizer_of_increment.push_back(0.0);
      rep.final_objective =
          scale_objective(lam, an, s.alpha, s.gamma, s.beta, base_fid, base_reg, 0.0);
    } else {
      t.increments.push_back(cand.increment);
      t.partial_sums.push_back(sum_cand);
      t.fidelity.push_back(fid_cand);
      t.regularizer_of_sum.push_back(regsum_cand);
      t.regularizer_of_increment.push_back(reginc_cand);
      rep.final_objective =
          scale_objective(lam, an, s.alpha, s.gamma, s.beta, fid_cand, regsum_cand, reginc_cand);
      base = t.partial_sums.back();
      base_fid = fid_cand;
      base_reg = regsum_cand;
    }
    t.augmented.push_back(detail::pow_or_identity(t.fidelity.back(), s.alpha) +
                          an * detail::pow_or_identity(t.regularizer_of_sum.back(), s.gamma));
    t.inner_reports.push_back(std::move(rep));

    if (delta_target && t.fidelity.back() <= *delta_target) break;
  }
  return out;
}

// Single-step regularization: one minimization of lambda d^alpha + |.|^beta
// over E, i.e. the n_max = 0, a0 = 0 special case of the iteration.
template <class P, class Solver>
  requires MultiscaleProblem<P>
std::pair<typename P::Element, double> single_step_regularized(const P& p, double lambda,
                                                               Solver&& solver, double tol,
                                                               double alpha = 2.0,
                                                               double beta = 1.0) {
  if (!(lambda > 0.0)) throw std::invalid_argument("single_step_regularized: lambda must be > 0");
  ScaleSchedule s;
  s.lambda0 = lambda;
  s.lambda_growth = 2.0;
  s.a0 = 0.0;
  s.alpha = alpha;
  s.beta = beta;
  s.n_max = 0;
  auto run = run_multiscale(p, s, solver, tol);
  if (!run.ok()) throw std::runtime_error("single_step_regularized: " + run.error->message);
  return {run.trace.partial_sums.at(0), run.trace.fidelity.at(0)};
}

struct ResidualRow {
  int n = 0;
  double fidelity = 0.0;
  double augmented = 0.0;
  double reg_increment = 0.0;
  double reg_sum = 0.0;
  bool safeguard_used = false;
};

// Echoes the stored per-scale values; nothing is recomputed.
template <class E>
std::vector<ResidualRow> residual_summary(const DecompositionTrace<E>& t) {
  if (t.size() == 0) throw std::invalid_argument("residual_summary: empty trace");
  std::vector<ResidualRow> rows;
  rows.reserve(t.size());
  for (std::size_t n = 0; n < t.size(); ++n) {
    rows.push_back(ResidualRow{static_cast<int>(n), t.fidelity[n], t.augmented[n],
                               t.regularizer_of_increment[n], t.regularizer_of_sum[n],
                               t.inner_reports[n].safeguard_used});
  }
  return rows;
}

} // namespace msd

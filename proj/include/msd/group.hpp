#pragma once

#include <cmath>
#include <concepts>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "msd/multiscale.hpp"
#include "msd/schedule.hpp"

namespace msd {

// Topological-group variant: composition replaces addition and the
// regularizer is the left-invariant distance to the identity.
template <class G>
concept GroupProblem = requires(const G& g, const typename G::Element& x,
                                const typename G::Element& y) {
  typename G::Element;
  { g.identity() } -> std::convertible_to<typename G::Element>;
  { g.compose(x, y) } -> std::convertible_to<typename G::Element>;
  { g.inverse(x) } -> std::convertible_to<typename G::Element>;
  { g.distance(x, y) } -> std::convertible_to<double>;
  { g.fidelity(x) } -> std::convertible_to<double>;
};

template <class E>
struct GroupTrace {
  ScaleSchedule schedule;
  ScheduleRegime regime = ScheduleRegime::Unclassified;
  std::vector<E> increments;          // psi_n
  std::vector<E> compositions;        // psi~_n = psi~_{n-1} . psi_n
  std::vector<double> fidelity;
  std::vector<double> dist_increment; // d(psi_n, e)
  std::vector<double> dist_sum;       // d(psi~_n, e)
  std::vector<double> augmented;      // fidelity^alpha + a_n d(psi~_n, e)^gamma
  std::vector<InnerReport> inner_reports;
  std::size_t size() const { return fidelity.size(); }
};

template <class E>
struct GroupRunResult {
  GroupTrace<E> trace;
  std::optional<ScaleError> error;
  bool ok() const { return !error.has_value(); }
};

// Per-scale problem: minimize over psi
//   lambda_n [ d_Y(Nhat, N(psi~_{n-1} . psi))^alpha + a_n d(psi~_{n-1}.psi, e)^gamma ]
//     + d(psi, e)^beta.
// The identity increment plays the role of the zero safeguard.
template <class G, class Solver>
  requires GroupProblem<G>
GroupRunResult<typename G::Element> run_group_multiscale(const G& g, const ScaleSchedule& s,
                                                         Solver&& solver, double tol) {
  using E = typename G::Element;
  s.validate();

  GroupRunResult<E> out;
  GroupTrace<E>& t = out.trace;
  t.schedule = s;
  t.regime = classify_schedule(s);

  E base = g.identity();
  double base_fid = g.fidelity(base);
  double base_dist = 0.0; // d(e, e)

  for (int n = 0; n <= s.n_max; ++n) {
    const double lam = s.lambda(n);
    const double an = s.a(n);

    InnerResult<E> cand;
    try {
      cand = solver(g, base, lam, an, tol, n);
    } catch (const std::exception& ex) {
      out.error = ScaleError{n, std::string("inner solver failed: ") + ex.what()};
      return out;
    }

    const E comp_cand = g.compose(base, cand.increment);
    const double dinc = g.distance(cand.increment, g.identity());
    InnerReport rep;
    rep.iterations = cand.iterations;
    rep.converged = cand.converged;
    rep.note = cand.note;

    bool use_identity = !std::isfinite(dinc);
    double fid_cand = 0.0, dsum_cand = 0.0;
    if (!use_identity) {
      fid_cand = g.fidelity(comp_cand);
      dsum_cand = g.distance(comp_cand, g.identity());
      const double obj_cand =
          scale_objective(lam, an, s.alpha, s.gamma, s.beta, fid_cand, dsum_cand, dinc);
      const double obj_id =
          scale_objective(lam, an, s.alpha, s.gamma, s.beta, base_fid, base_dist, 0.0);
      const double aug_cand = detail::pow_or_identity(fid_cand, s.alpha) +
                              an * detail::pow_or_identity(dsum_cand, s.gamma);
      const double aug_id = detail::pow_or_identity(base_fid, s.alpha) +
                            an * detail::pow_or_identity(base_dist, s.gamma);
      use_identity = !(obj_cand <= obj_id && aug_cand <= aug_id);
    }

    if (use_identity) {
      rep.safeguard_used = true;
      t.increments.push_back(g.identity());
      t.compositions.push_back(base);
      t.fidelity.push_back(base_fid);
      t.dist_sum.push_back(base_dist);
      t.dist_increment.push_back(0.0);
    } else {
      t.increments.push_back(cand.increment);
      t.compositions.push_back(comp_cand);
      t.fidelity.push_back(fid_cand);
      t.dist_sum.push_back(dsum_cand);
      t.dist_increment.push_back(dinc);
      base = t.compositions.back();
      base_fid = fid_cand;
      base_dist = dsum_cand;
    }
    t.augmented.push_back(detail::pow_or_identity(t.fidelity.back(), s.alpha) +
                          an * detail::pow_or_identity(t.dist_sum.back(), s.gamma));
    t.inner_reports.push_back(std::move(rep));
  }
  return out;
}

struct GroupDistanceRow {
  int n = 0;
  double dist_increment = 0.0;
  double dist_sum = 0.0;
  double fidelity = 0.0;
};

template <class E>
std::vector<GroupDistanceRow> group_distance_report(const GroupTrace<E>& t) {
  if (t.size() == 0) throw std::invalid_argument("group_distance_report: empty trace");
  std::vector<GroupDistanceRow> rows;
  rows.reserve(t.size());
  for (std::size_t n = 0; n < t.size(); ++n)
    rows.push_back({static_cast<int>(n), t.dist_increment[n], t.dist_sum[n], t.fidelity[n]});
  return rows;
}

} // namespace msd

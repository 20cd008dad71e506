#include "msd/counterexample/planar.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <thread>

#include "msd/multiscale.hpp"

namespace msd::planarcx {

double norm(Vec2 v) { return std::hypot(v.x, v.y); }

namespace {
constexpr double kPi = 3.14159265358979323846;

double wrap_angle(double t) {
  double r = std::fmod(t, 2.0 * kPi);
  if (r < 0) r += 2.0 * kPi;
  return r;
}
} // namespace

void PlanarConfig::validate() const {
  if (!(c >= 9.0)) throw std::invalid_argument("planar: c >= 9 required");
  if (!(b / c > 2.0)) throw std::invalid_argument("planar: b/c > 2 required");
  if (!(epsilon > 0.0)) throw std::invalid_argument("planar: epsilon > 0 required");
  if (nbar < 1) throw std::invalid_argument("planar: nbar >= 1 required");
  if (!(64.0 < std::pow(b / (2.0 * c), 2 * nbar + 1)))
    throw std::invalid_argument("planar: 64 < (b/(2c))^{2 nbar + 1} required");
  if (n_steps < 0) throw std::invalid_argument("planar: n_steps >= 0 required");
  if (grid_angular < 16 || grid_radial < 16)
    throw std::invalid_argument("planar: grid too coarse");
}

double r_seq(int n) { return 1.0 - std::ldexp(1.0, -(n + 1)); }
double s_seq(int n) { return r_seq(n) + std::ldexp(1.0, -(n + 3)); }

double h_gap(int n, const PlanarConfig& cfg) {
  return (9.0 / 8.0) * (std::pow(cfg.c, -(n + 1)) + std::pow(cfg.b, -(n + 1))) *
         std::ldexp(1.0, -(n + 2));
}

PlanarSequences planar_sequences(int n, const PlanarConfig& cfg) {
  if (n < 0) throw std::invalid_argument("planar_sequences: n >= 0");
  return PlanarSequences{r_seq(n), s_seq(n), h_gap(n, cfg)};
}

namespace {

// Tables of r_n, s_n and the gaps 1 - h_n, plus the per-annulus geometry of
// the rotating construction.
class Field {
 public:
  explicit Field(const PlanarConfig& cfg) : cfg_(cfg) {
    cfg.validate();
    r_.resize(kMaxN);
    s_.resize(kMaxN);
    g_.resize(kMaxN);
    for (int n = 0; n < kMaxN; ++n) {
      r_[n] = r_seq(n);
      s_[n] = s_seq(n);
      g_[n] = h_gap(n, cfg);
    }
  }

  const PlanarConfig& config() const { return cfg_; }
  double r(int n) const { return r_[n]; }
  double s(int n) const { return s_[n]; }
  double gap(int n) const { return g_[n]; }

  // 1 - Xi~(rho)
  double xi_gap(double rho) const {
    if (rho >= 1.0) return -2.0 * (rho - 1.0);
    if (rho <= r_[0]) {
      const double d = rho - r_[0];
      return g_[0] - 2.0 * d + cfg_.epsilon * d * d;
    }
    // r_n <= rho < 1: n = floor(-log2(1-rho)) - 1
    int n = static_cast<int>(std::floor(-std::log2(1.0 - rho))) - 1;
    n = std::clamp(n, 0, kMaxN - 3);
    while (n + 1 < kMaxN && rho >= r_[n + 1]) ++n;
    while (n > 0 && rho < r_[n]) --n;
    if (rho <= s_[n]) return g_[n];
    // affine ramp between h_n at s_n and h_{n+1} at r_{n+1}, in gap form
    const double w = (rho - s_[n]) / (r_[n + 1] - s_[n]);
    return g_[n] + (g_[n + 1] - g_[n]) * w;
  }

  // 1 - N(x) of the full construction.
  double n_gap(Vec2 p) const {
    const double rho = norm(p);
    if (rho >= 1.0 || rho <= s_[0]) return xi_gap(rho);
    // locate k = max index with s_k <= rho; modified annuli are [s_2n, s_2n+1]
    int k = static_cast<int>(std::floor(-std::log2(1.0 - rho))) - 1;
    k = std::clamp(k, 0, kMaxN - 3);
    while (k + 1 < kMaxN && rho >= s_[k + 1]) ++k;
    while (k > 0 && rho < s_[k]) --k;
    if (k % 2 != 0) return xi_gap(rho); // between s_odd and s_even: untouched
    const int n = k / 2;
    if (n < cfg_.nbar) return xi_gap(rho);

    // local frame of annulus n: the construction is rotated by
    // (n - nbar) * pi/2; quarter-turn rotations are exact in floats.
    Vec2 q = p;
    const int quarters = (n - cfg_.nbar) % 4;
    for (int i = 0; i < quarters; ++i) q = Vec2{q.y, -q.x};
    // the curve-membership test below depends only on x1 and ||x||, which
    // already encodes the mirror symmetry in the local frame
    const double x1 = q.x;
    if (x1 <= 0.0) return xi_gap(rho);

    const double r2n = r_[2 * n], r2n1 = r_[2 * n + 1];
    const double s2n = s_[2 * n], s2n1 = s_[2 * n + 1];
    const double dts = s2n1 - r2n1; // t(P) - r(P), constant along the segment

    // Q = intersection of the segment (r_2n, 0) -> (0, r_{2n+1}) with the
    // circle of radius s_2n (unique root with positive parameter).
    const double a2 = r2n * r2n + r2n1 * r2n1;
    const double a1 = -2.0 * r2n * r2n;
    const double a0 = r2n * r2n - s2n * s2n;
    const double disc = a1 * a1 - 4.0 * a2 * a0;
    const double vq = (-a1 + std::sqrt(std::max(disc, 0.0))) / (2.0 * a2);
    const Vec2 Q{r2n * (1.0 - vq), r2n1 * vq};

    auto seg_point = [&](double u) {
      return Vec2{Q.x * (1.0 - u), Q.y + u * (r2n1 - Q.y)};
    };
    auto inside = [&](double u) {
      const Vec2 P = seg_point(u);
      const double rp = norm(P);
      return (x1 <= P.x) ? (rho <= rp) : (rho <= rp + dts);
    };

    if (inside(0.0)) return g_[2 * n]; // red region, down to the s_2n circle
    if (!inside(1.0)) return xi_gap(rho); // numerically at/over the outer rim

    double lo = 0.0, hi = 1.0; // inside(lo) false, inside(hi) true
    for (int it = 0; it < 64 && hi - lo > 1e-14; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (inside(mid)) hi = mid;
      else lo = mid;
    }
    const double rp = norm(seg_point(0.5 * (lo + hi)));
    return xi_gap(rp);
  }

 private:
  static constexpr int kMaxN = 128;
  PlanarConfig cfg_;
  std::vector<double> r_, s_, g_;
};

} // namespace

double xi_gap(double r, const PlanarConfig& cfg) { return Field(cfg).xi_gap(r); }

double n_gap(Vec2 x, const PlanarConfig& cfg) { return Field(cfg).n_gap(x); }

namespace {

struct GridPoint {
  int ia = 0;
  int ir = 0;
  double value = 0.0;
};

// Golden-section line search with bracket expansion around a seed.
template <class F>
double refine_1d(F&& f, double seed, double window, double lo_cap, double hi_cap, double tol) {
  double lo = std::max(lo_cap, seed - window);
  double hi = std::min(hi_cap, seed + window);
  for (int grow = 0; grow < 24; ++grow) {
    const double flo = f(lo), fhi = f(hi), fseed = f(seed);
    const bool lo_edge = flo < fseed && lo > lo_cap;
    const bool hi_edge = fhi < fseed && hi < hi_cap;
    if (!lo_edge && !hi_edge) break;
    const double w = hi - lo;
    if (lo_edge) lo = std::max(lo_cap, lo - w);
    if (hi_edge) hi = std::min(hi_cap, hi + w);
  }
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
  double fc = f(c), fd = f(d);
  while (hi - lo > tol) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - gr * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + gr * (hi - lo);
      fd = f(d);
    }
  }
  const double mid = 0.5 * (lo + hi);
  double best = mid, fb = f(mid);
  if (fc < fb) { best = c; fb = fc; }
  if (fd < fb) { best = d; }
  return best;
}

} // namespace

ArgminResult polar_argmin(const std::function<double(Vec2)>& objective, double r_lo, double r_hi,
                          double phi0, const PlanarConfig& cfg) {
  const int A = cfg.grid_angular;
  const int R = cfg.grid_radial;
  r_lo = std::max(0.0, r_lo);
  const double dr = (r_hi - r_lo) / (R - 1);
  const double dth = 2.0 * kPi / A;

  auto point_at = [&](int ia, double r) {
    const double th = phi0 + dth * ia;
    return Vec2{r * std::cos(th), r * std::sin(th)};
  };
  auto value_at = [&](int ia, int ir) { return objective(point_at(ia, r_lo + dr * ir)); };

  // phase A: per-row minima
  std::vector<double> rowmin(A, std::numeric_limits<double>::infinity());
  int nthreads = cfg.threads > 0 ? cfg.threads
                                 : static_cast<int>(std::thread::hardware_concurrency());
  nthreads = std::max(1, std::min(nthreads, A));
  {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    auto work = [&]() {
      for (;;) {
        const int ia = next.fetch_add(1);
        if (ia >= A) return;
        const double th = phi0 + dth * ia;
        const double cth = std::cos(th), sth = std::sin(th);
        double m = std::numeric_limits<double>::infinity();
        for (int ir = 0; ir < R; ++ir) {
          const double r = r_lo + dr * ir;
          m = std::min(m, objective(Vec2{r * cth, r * sth}));
        }
        rowmin[ia] = m;
      }
    };
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  double gmin = rowmin[0];
  for (double m : rowmin) gmin = std::min(gmin, m);
  const double tie_abs = cfg.tie_rel * (std::abs(gmin) + 1e-12);

  // phase B: collect tie cells (deterministic row order)
  std::vector<std::vector<GridPoint>> row_ties(A);
  {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    auto work = [&]() {
      for (;;) {
        const int ia = next.fetch_add(1);
        if (ia >= A) return;
        if (rowmin[ia] > gmin + tie_abs) continue;
        for (int ir = 0; ir < R; ++ir) {
          const double v = value_at(ia, ir);
          if (v <= gmin + tie_abs) row_ties[ia].push_back(GridPoint{ia, ir, v});
        }
      }
    };
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }

  // group ties into grid-adjacent components (angular index wraps); keep two
  // seeds per component: its best-value cell and its first cell in scan
  // order. The latter realizes the smallest-relative-angle tie-break exactly
  // when the minimum is flat (e.g. a whole circle of minimizers at scale 0).
  std::set<std::pair<int, int>> open;
  for (const auto& row : row_ties)
    for (const auto& gp : row) open.insert({gp.ia, gp.ir});
  std::vector<GridPoint> reps;
  int components = 0;
  while (!open.empty()) {
    ++components;
    std::vector<std::pair<int, int>> stack{*open.begin()};
    open.erase(open.begin());
    GridPoint best{stack[0].first, stack[0].second, value_at(stack[0].first, stack[0].second)};
    GridPoint first = best;
    while (!stack.empty()) {
      auto [ia, ir] = stack.back();
      stack.pop_back();
      const double v = value_at(ia, ir);
      if (v < best.value || (v == best.value && (ia < best.ia || (ia == best.ia && ir < best.ir))))
        best = GridPoint{ia, ir, v};
      if (ia < first.ia || (ia == first.ia && ir < first.ir)) first = GridPoint{ia, ir, v};
      const int neigh[4][2] = {{ia + 1, ir}, {ia - 1, ir}, {ia, ir + 1}, {ia, ir - 1}};
      for (auto& nb : neigh) {
        int na = (nb[0] % A + A) % A;
        int nr = nb[1];
        if (nr < 0 || nr >= R) continue;
        auto it = open.find({na, nr});
        if (it != open.end()) {
          open.erase(it);
          stack.push_back({na, nr});
        }
      }
    }
    reps.push_back(best);
    if (first.ia != best.ia || first.ir != best.ir) reps.push_back(first);
  }
  if (reps.empty()) reps.push_back(GridPoint{0, 0, value_at(0, 0)});

  // refine each component by polar coordinate descent
  struct Refined {
    double rel_angle = 0.0;
    double radius = 0.0;
    double value = 0.0;
  };
  std::vector<Refined> refined;
  for (const auto& rep : reps) {
    double th = dth * rep.ia; // relative to phi0
    double rr = r_lo + dr * rep.ir;

    // polar coordinate descent with strict-improvement guards: flat
    // directions must not drift the coordinate away from the tie-break
    // representative
    auto polar_cd = [&]() {
      for (int sweep = 0; sweep < 200; ++sweep) {
        const double th_old = th, r_old = rr;
        auto fth = [&](double t) {
          const double ang = phi0 + t;
          return objective(Vec2{rr * std::cos(ang), rr * std::sin(ang)});
        };
        const double th_cand =
            refine_1d(fth, th, dth, th - kPi / 2, th + kPi / 2, cfg.refine_tol);
        if (fth(th_cand) < fth(th)) th = th_cand;
        auto fr = [&](double r) {
          const double ang = phi0 + th;
          return objective(Vec2{r * std::cos(ang), r * std::sin(ang)});
        };
        const double r_cand = refine_1d(fr, rr, dr, r_lo, r_hi, cfg.refine_tol);
        if (fr(r_cand) < fr(rr)) rr = r_cand;
        if (std::abs(th - th_old) < cfg.refine_tol && std::abs(rr - r_old) < cfg.refine_tol)
          break;
      }
    };

    // pattern-search phase: the corner points of the curve family are local
    // minima along both polar axes, with the descending valley running
    // diagonally (the Q -> target segment direction); a rosette of fixed
    // planar directions escapes such corners. The improvement margin keeps
    // ulp-level noise on exactly flat valleys (the scale-0 circle of
    // minimizers) from drifting the tie-break point.
    auto rosette = [&]() {
      const double ang0 = phi0 + th;
      Vec2 pt{rr * std::cos(ang0), rr * std::sin(ang0)};
      const double f_start = objective(pt);
      double f_cur = f_start;
      const int n_dirs = 32;
      for (int round = 0; round < 100; ++round) {
        bool improved = false;
        for (int k = 0; k < n_dirs; ++k) {
          const double ang = 2.0 * kPi * k / n_dirs;
          const Vec2 d{std::cos(ang), std::sin(ang)};
          auto f1d = [&](double t) { return objective(Vec2{pt.x + t * d.x, pt.y + t * d.y}); };
          const double t_cand = refine_1d(f1d, 0.0, dr, -0.05, 0.05, cfg.refine_tol);
          const double f_cand = f1d(t_cand);
          if (f_cand < f_cur - 1e-12 * std::abs(f_cur)) {
            pt = Vec2{pt.x + t_cand * d.x, pt.y + t_cand * d.y};
            f_cur = f_cand;
            improved = true;
          }
        }
        if (!improved) break;
      }
      const double rnew = norm(pt);
      if (f_cur < f_start && rnew >= r_lo && rnew <= r_hi) {
        rr = rnew;
        th = wrap_angle(std::atan2(pt.y, pt.x) - phi0);
        return true;
      }
      return false;
    };

    // alternate: the rosette lands on the target arc, where a final polar
    // theta search closes the remaining along-arc offset exactly
    polar_cd();
    for (int phase = 0; phase < 5; ++phase) {
      if (!rosette()) break;
      polar_cd();
    }
    const double ang = phi0 + th;
    double rel = wrap_angle(th);
    // a minimizer refined a hair below rel angle 0 must still rank first
    if (rel > 2.0 * kPi - 1e-6) rel -= 2.0 * kPi;
    refined.push_back(Refined{rel, rr,
                              objective(Vec2{rr * std::cos(ang), rr * std::sin(ang)})});
  }

  double vbest = refined[0].value;
  for (const auto& c : refined) vbest = std::min(vbest, c.value);
  // relative window plus a floor at the refinement resolution, so exact
  // mirror ties still merge when the minimum value itself is near zero
  const double tie2 = cfg.tie_rel * (std::abs(vbest) + 1e-12) + 100.0 * cfg.refine_tol;
  const Refined* pick = nullptr;
  for (const auto& c : refined) {
    if (c.value > vbest + tie2) continue;
    if (!pick || c.rel_angle < pick->rel_angle - 1e-12 ||
        (std::abs(c.rel_angle - pick->rel_angle) <= 1e-12 && c.radius < pick->radius))
      pick = &c;
  }
  const double ang = phi0 + pick->rel_angle;
  ArgminResult out;
  out.point = Vec2{pick->radius * std::cos(ang), pick->radius * std::sin(ang)};
  out.value = pick->value;
  out.tie_components = components;
  return out;
}

namespace {

struct PlanarProblem {
  using Element = Vec2;
  const Field& field;
  bool radial = false;

  Vec2 zero() const { return Vec2{0.0, 0.0}; }
  Vec2 add(Vec2 a, Vec2 b) const { return Vec2{a.x + b.x, a.y + b.y}; }
  double regularizer(Vec2 x) const { return norm(x); }
  bool admissible(Vec2) const { return true; }
  double fidelity(Vec2 x) const {
    return std::abs(radial ? field.xi_gap(norm(x)) : field.n_gap(x));
  }
};

struct OracleSolver {
  const Field& field;
  const PlanarConfig& cfg;
  bool radial = false;

  InnerResult<Vec2> operator()(const PlanarProblem& p, Vec2 base, double lambda, double a,
                               double /*tol*/, int scale) const {
    if (h_gap(scale, cfg) < 1000.0 * std::numeric_limits<double>::epsilon())
      throw std::runtime_error("precision budget exceeded (gap below 1e3 eps)");
    double r_lo, r_hi;
    if (scale == 0) {
      r_lo = 0.0;
      r_hi = s_seq(1);
    } else {
      const double margin = (s_seq(scale) - r_seq(scale - 1)) / 10.0;
      r_lo = r_seq(scale - 1) - margin;
      r_hi = s_seq(scale) + margin;
    }
    const double phi0 = scale == 0 ? 0.0 : wrap_angle(std::atan2(base.y, base.x));
    auto objective = [&](Vec2 x) {
      return scale_objective(lambda, a, 1.0, 1.0, 1.0, p.fidelity(x), norm(x),
                             norm(Vec2{x.x - base.x, x.y - base.y}));
    };
    const ArgminResult res = polar_argmin(objective, r_lo, r_hi, phi0, cfg);
    InnerResult<Vec2> out;
    out.increment = Vec2{res.point.x - base.x, res.point.y - base.y};
    out.objective = res.value;
    out.note = "tie_components=" + std::to_string(res.tie_components);
    return out;
  }
};

} // namespace

PlanarRun run_planar_counterexample(const PlanarConfig& cfg, bool radial_variant) {
  cfg.validate();
  Field field(cfg);
  PlanarProblem problem{field, radial_variant};
  OracleSolver solver{field, cfg, radial_variant};

  ScaleSchedule s;
  s.lambda0 = 1.0;
  s.lambda_growth = cfg.b;
  s.a0 = 1.0;
  s.a_decay = cfg.c;
  s.alpha = s.beta = s.gamma = 1.0;
  s.n_max = cfg.n_steps;

  auto run = run_multiscale(problem, s, solver, 1e-12);

  PlanarRun out;
  for (std::size_t n = 0; n < run.trace.size(); ++n) {
    const Vec2 sum = run.trace.partial_sums[n];
    PlanarStep step;
    step.n = static_cast<int>(n);
    step.radius = norm(sum);
    step.theta = wrap_angle(std::atan2(sum.y, sum.x));
    const double quarter = step.theta / (kPi / 2.0);
    const int lbl = static_cast<int>(std::lround(quarter)) % 4;
    if (std::abs(quarter - std::lround(quarter)) * (kPi / 2.0) <= 1e-4) step.theta_label = lbl;
    step.fidelity_gap = run.trace.fidelity[n];
    step.objective = run.trace.inner_reports[n].final_objective;
    out.steps.push_back(step);
  }
  out.last_trusted_scale = static_cast<int>(run.trace.size()) - 1;
  if (!run.ok()) {
    out.aborted = true;
    out.abort_reason = run.error->message;
  }
  return out;
}

} // namespace msd::planarcx

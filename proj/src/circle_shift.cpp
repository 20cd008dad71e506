#include "msd/circle_shift.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace msd {

CircleShiftProblem::CircleShiftProblem(std::vector<double> a, std::vector<double> b)
    : i0(std::move(a)), i1(std::move(b)) {
  if (i0.size() != i1.size() || i0.empty())
    throw std::invalid_argument("circle shift: signals must be nonempty and equally long");
  period = static_cast<double>(i0.size());
}

double CircleShiftProblem::wrap(double t) const {
  double r = std::fmod(t, period);
  if (r < 0) r += period;
  return r;
}

double CircleShiftProblem::distance(Element a, Element b) const {
  const double d = wrap(a - b);
  return std::min(d, period - d);
}

std::vector<double> CircleShiftProblem::shifted(double t) const {
  const int m = static_cast<int>(i0.size());
  std::vector<double> out(i0.size());
  for (int i = 0; i < m; ++i) {
    const double x = wrap(static_cast<double>(i) - t);
    const int lo = static_cast<int>(std::floor(x)) % m;
    const int hi = (lo + 1) % m;
    const double frac = x - std::floor(x);
    out[i] = (1.0 - frac) * i0[lo] + frac * i0[hi];
  }
  return out;
}

double CircleShiftProblem::fidelity(Element t) const {
  const std::vector<double> s = shifted(t);
  double acc = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double d = s[i] - i1[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

InnerResult<double> CircleShiftSolver::operator()(const CircleShiftProblem& g, double base,
                                                  double lambda, double a, double /*tol*/,
                                                  int /*scale*/) const {
  auto objective = [&](double psi) {
    const double comp = g.compose(base, psi);
    return scale_objective(lambda, a, alpha, gamma, beta, g.fidelity(comp),
                           g.distance(comp, g.identity()), g.distance(psi, g.identity()));
  };

  double best_t = 0.0, best_v = objective(0.0);
  for (int i = 0; i < scan_candidates; ++i) {
    const double t = g.period * i / scan_candidates;
    const double v = objective(t);
    if (v < best_v) {
      best_v = v;
      best_t = t;
    }
  }
  const double span = g.period / scan_candidates;
  double lo = best_t - span, hi = best_t + span;
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
  for (int i = 0; i < refine_iters; ++i) {
    if (objective(c) < objective(d)) hi = d;
    else lo = c;
    c = hi - gr * (hi - lo);
    d = lo + gr * (hi - lo);
  }
  InnerResult<double> r;
  r.increment = g.wrap((lo + hi) / 2);
  r.objective = objective(r.increment);
  r.iterations = scan_candidates + refine_iters;
  return r;
}

std::vector<double> load_signal_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::vector<double> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    out.push_back(std::stod(line));
  }
  if (out.empty()) throw std::runtime_error("signal csv is empty: " + path);
  return out;
}

} // namespace msd

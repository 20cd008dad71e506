#pragma once

#include <string>
#include <vector>

#include "msd/group.hpp"
#include "msd/multiscale.hpp"

namespace msd {

// Registration toy on the circle rotation group: G = R mod period, acting on
// periodic 1-D signals by translation. d(t, e) is the circle distance and the
// fidelity is the discrete L2 misfit after shifting I0 by the group element,
// with linear interpolation at fractional shifts.
struct CircleShiftProblem {
  using Element = double; // shift, stored in [0, period)

  std::vector<double> i0;
  std::vector<double> i1;
  double period = 0.0; // = signal length (unit sample spacing)

  CircleShiftProblem(std::vector<double> a, std::vector<double> b);

  double wrap(double t) const;

  Element identity() const { return 0.0; }
  Element compose(Element a, Element b) const { return wrap(a + b); }
  Element inverse(Element a) const { return wrap(-a); }
  double distance(Element a, Element b) const;
  double fidelity(Element t) const; // || I0(. - t) - I1 ||

  // I0 translated by t, sampled back on the grid.
  std::vector<double> shifted(double t) const;
};

// Coarse scan over candidate shifts followed by golden-section refinement of
// the per-scale objective; deterministic. The exponents must match the
// schedule the driver runs with.
struct CircleShiftSolver {
  int scan_candidates = 256;
  int refine_iters = 80;
  double alpha = 2.0, beta = 1.0, gamma = 1.0;

  static CircleShiftSolver for_schedule(const ScaleSchedule& s) {
    CircleShiftSolver v;
    v.alpha = s.alpha;
    v.beta = s.beta;
    v.gamma = s.gamma;
    return v;
  }

  InnerResult<double> operator()(const CircleShiftProblem& g, double base, double lambda, double a,
                                 double tol, int scale) const;
};

std::vector<double> load_signal_csv(const std::string& path);

} // namespace msd

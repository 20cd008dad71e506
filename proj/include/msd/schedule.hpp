#pragma once

#include <string>
#include <vector>

namespace msd {

// Which convergence regime a geometric parameter family (lambda_n, a_n)
// falls into. Basic needs a_n == 0 and bounded 2^{beta n}/lambda_n;
// Tight additionally carries a vanishing partial-sum penalty a_n;
// TightConvergent needs 2^{beta n}/(lambda_n a_n) -> 0, which is what the
// strong (subsequence-in-norm) convergence results ask for.
enum class ScheduleRegime { Basic, Tight, TightConvergent, Unclassified };

const char* to_string(ScheduleRegime r);

// Geometric scale schedule: lambda_n = lambda0 * lambda_growth^n,
// a_n = a0 / a_decay^n. Geometric families realize every regime and keep
// the classification closed-form.
struct ScaleSchedule {
  double lambda0 = 1.0;       // > 0
  double lambda_growth = 2.0; // > 1
  double a0 = 0.0;            // >= 0; a0 == 0 means a_n == 0 for all n
  double a_decay = 1.0;       // >= 1, so a_n is nonincreasing
  double alpha = 2.0;
  double beta = 1.0;
  double gamma = 1.0;
  int n_max = 0; // number of scales to run is n_max + 1

  double lambda(int n) const;
  double a(int n) const;

  // Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

ScheduleRegime classify_schedule(const ScaleSchedule& s);

// Evaluated ratio sequences used by the check-schedule command and by the
// classification property test: 2^{beta n}/lambda_n and (when a_n > 0)
// 2^{beta n}/(lambda_n a_n), for n = 0..n_limit.
struct ScheduleRatios {
  std::vector<double> lambda_ratio;
  std::vector<double> tight_ratio; // empty when a0 == 0
};

ScheduleRatios evaluate_ratios(const ScaleSchedule& s, int n_limit);

} // namespace msd

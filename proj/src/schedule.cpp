#include "msd/schedule.hpp"

#include <cmath>
#include <stdexcept>

namespace msd {

const char* to_string(ScheduleRegime r) {
  switch (r) {
    case ScheduleRegime::Basic: return "Basic";
    case ScheduleRegime::Tight: return "Tight";
    case ScheduleRegime::TightConvergent: return "TightConvergent";
    case ScheduleRegime::Unclassified: return "Unclassified";
  }
  return "Unclassified";
}

double ScaleSchedule::lambda(int n) const { return lambda0 * std::pow(lambda_growth, n); }

double ScaleSchedule::a(int n) const {
  if (a0 == 0.0) return 0.0;
  return a0 / std::pow(a_decay, n);
}

void ScaleSchedule::validate() const {
  if (!(lambda0 > 0.0)) throw std::invalid_argument("schedule: lambda0 must be > 0");
  if (!(lambda_growth > 1.0)) throw std::invalid_argument("schedule: lambda_growth must be > 1");
  if (!(a0 >= 0.0)) throw std::invalid_argument("schedule: a0 must be >= 0");
  if (!(a_decay >= 1.0)) throw std::invalid_argument("schedule: a_decay must be >= 1");
  if (!(alpha > 0.0) || !(beta > 0.0) || !(gamma > 0.0))
    throw std::invalid_argument("schedule: exponents alpha, beta, gamma must be > 0");
  if (n_max < 0) throw std::invalid_argument("schedule: n_max must be >= 0");
}

ScheduleRegime classify_schedule(const ScaleSchedule& s) {
  s.validate();
  const double two_beta = std::pow(2.0, s.beta);
  const bool lambda_ok = s.lambda_growth >= two_beta; // limsup 2^{beta n}/lambda_n finite
  if (s.a0 == 0.0) {
    return lambda_ok ? ScheduleRegime::Basic : ScheduleRegime::Unclassified;
  }
  const bool a_vanishes = s.a_decay > 1.0;
  if (a_vanishes && s.lambda_growth / s.a_decay > two_beta)
    return ScheduleRegime::TightConvergent; // 2^{beta n}/(lambda_n a_n) -> 0
  if (a_vanishes && lambda_ok) return ScheduleRegime::Tight;
  return ScheduleRegime::Unclassified;
}

ScheduleRatios evaluate_ratios(const ScaleSchedule& s, int n_limit) {
  ScheduleRatios out;
  out.lambda_ratio.reserve(n_limit + 1);
  for (int n = 0; n <= n_limit; ++n)
    out.lambda_ratio.push_back(std::pow(2.0, s.beta * n) / s.lambda(n));
  if (s.a0 > 0.0) {
    out.tight_ratio.reserve(n_limit + 1);
    for (int n = 0; n <= n_limit; ++n)
      out.tight_ratio.push_back(std::pow(2.0, s.beta * n) / (s.lambda(n) * s.a(n)));
  }
  return out;
}

} // namespace msd

#pragma once

#include <span>
#include <vector>

namespace msd::l2cx {

// Truncation of the l2 example: X = E = l2 with plain norm ||a|| and
// weighted regularizer |a| = (sum (n a_n)^2)^{1/2}, b_n = 1/n (so ||b|| is
// finite while the truncated |b| grows with the dimension), data value 0,
// alpha = beta = 2. The single-step problem is min |N(a)|^2 + |a|^2/lambda.
struct L2Config {
  int dimension = 64;     // >= 8
  double r0 = 0.25;       // center radius of the V1 shell A2
  double c1_margin = 2.0; // safety factor for the V1 radial-penalty constant
  void validate() const;
};

double weighted_norm(std::span<const double> a);
double plain_norm(std::span<const double> a);

struct FResult {
  double value = 0.0; // f(r) = min { |a| : ||a - b|| = r }
  double mu = 0.0;    // Lagrange multiplier of the dual 1-D problem
  bool zero = false;  // r >= ||b||: a = 0 is feasible, f = 0
};

// Constrained-quadratic minimum via its monotone 1-D dual: a_n = mu b_n /
// (mu + n^2), mu chosen so the sphere constraint holds, to 1e-12.
FResult l2ex_f(double r, const L2Config& cfg);

struct V2Row {
  double lambda = 0.0;
  double first_coord = 0.0;  // numeric minimizer radius on the e1 ray
  double closed_form = 0.0;  // sqrt((1/2) log(2 C1^2 lambda))
  double norm_sigma = 0.0;
  double value = 0.0;
  bool outside_branch = true; // minimizer escaped A1
};

struct V2Study {
  double b_norm = 0.0;
  double C = 0.0;          // f(||b||/2)^2
  double C1 = 0.0;         // from C1 e^{-(2||b||)^2} = 1/f(||b||/2)
  double lambda_bar = 0.0; // numerically located threshold
  std::vector<V2Row> rows;
};

// Second version: N(a) = g(||a||) outside A1 with g = C1 e^{-r^2} beyond
// 2||b||. When lambdas is empty, uses one decade above the located
// threshold (11 log-spaced points).
V2Study run_l2_v2(const L2Config& cfg, std::vector<double> lambdas = {});

struct V1Row {
  double lambda = 0.0;
  int active_index = 0;    // 1-based argmax |sigma_n|
  double norm_sigma = 0.0;
  double value = 0.0;
  bool in_A2 = true;       // shell minimum beat the A1 branch and the floor
  bool untrusted = false;  // boundary coordinates active: truncation too small
};

struct V1Study {
  double b_norm = 0.0;
  double C = 0.0;
  double C1 = 0.0; // radial-penalty constant of the shell fidelity
  std::vector<V1Row> rows;
};

// First version: N(a) = Ntilde(r0 a/||a||) + C1 | ||a|| - r0 | on the shell
// A2, with Ntilde(a) = sum |a_n|/n^2. Default ladder lambda = n^4 for
// n = 4..min(D-2, 12).
V1Study run_l2_v1(const L2Config& cfg, std::vector<double> lambdas = {});

} // namespace msd::l2cx

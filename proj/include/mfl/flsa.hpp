#pragma once

#include <span>
#include <vector>

namespace mfl {

// One-dimensional fused lasso signal approximator:
//
//   minimize over theta   1/2 ||x - theta||^2
//                         + lam1 * sum_i |theta_i|
//                         + lam2 * sum_i |theta_i - theta_{i+1}|
//
// This is the proximal operator of the combined sparsity + fusion penalty,
// the inner kernel of every solver update.
struct FusionProblem {
  std::vector<double> input;
  double lam1 = 0.0;
  double lam2 = 0.0;
};

// Exact minimizer, computed in O(m) by dynamic programming over the
// piecewise-linear derivative of the running message, followed by elementwise
// soft-thresholding (the sparsity penalty commutes with the fusion prox).
// Throws std::invalid_argument on non-finite entries or negative weights.
std::vector<double> flsa_solve(const FusionProblem& problem);
std::vector<double> flsa_solve(std::span<const double> x, double lam1,
                               double lam2);

struct KktReport {
  bool ok = false;
  double max_violation = 0.0;
  // Per-coordinate stationarity excess beyond the tolerance; 0 when the
  // coordinate admits valid subgradients.
  std::vector<double> violation;
};

// Optimality oracle: true iff there exist subgradients s_i of |theta_i| and
// u_i of |theta_i - theta_{i+1}| making the stationarity residual at most
// tol at every coordinate. Independent of the dynamic program above; it
// propagates the feasible interval of the fusion dual variable left to right.
KktReport flsa_check_kkt(const FusionProblem& problem,
                         std::span<const double> candidate, double tol = 1e-6);

double flsa_objective(const FusionProblem& problem,
                      std::span<const double> candidate);

inline double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

}  // namespace mfl

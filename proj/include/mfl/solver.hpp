#pragma once

#include <vector>

#include "mfl/model.hpp"

namespace mfl {

enum class StopRule {
  objective_relative,  // C1: |f+ - f| / f
  iterate_relative,    // C2: ||x+ - x|| / ||x||
};

struct SolverConfig {
  int max_iters = 80;
  double tau0 = 20.0;    // initial step size before backtracking
  double gamma = 0.6;    // backtracking shrink factor
  double epsilon = 1e-3;
  StopRule stop_rule = StopRule::objective_relative;
  int max_backtracks = 50;
};

struct FitResult {
  Coefficients coefficients;
  std::vector<double> objective_trace;  // initial value, then one per step
  std::vector<double> step_sizes;       // accepted tau per step
  int iterations_run = 0;
  bool converged = false;
  double final_criterion_value = 0.0;
};

// One proximal update at step size tau: intercepts take a plain gradient
// step, and each slope trajectory is replaced by the fused-lasso prox of its
// gradient-stepped values with weights (tau*lam1, tau*lam2).
Coefficients prox_step(const Coefficients& coeffs, const Coefficients& grad,
                       double tau, const PenaltyParams& params);

// G_tau = (current - prox_step)/tau, with the intercept block equal to the
// raw gradient block; vanishes exactly at solutions.
Coefficients generalized_gradient(const Coefficients& coeffs,
                                  const Coefficients& grad, double tau,
                                  const PenaltyParams& params);

// Geometric shrink from tau0 until the sufficient-decrease condition
//   g(x - tau G) <= g(x) - tau <grad, G> + (tau/2) ||G||^2
// holds; returns the accepted tau. Throws StepSizeError past the shrink cap.
double backtracking_search(const Coefficients& coeffs, const PanelData& data,
                           const PenaltyParams& params,
                           const SolverConfig& config);

// Full proximal gradient descent with per-iteration backtracking restarted
// from tau0 and the configured stopping criterion. Deterministic for fixed
// inputs. init defaults to all-zero coefficients.
FitResult fit(const PanelData& data, const PenaltyParams& params,
              const SolverConfig& config = {},
              const Coefficients* init = nullptr);

}  // namespace mfl

#include "mfl/solver.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "mfl/errors.hpp"
#include "mfl/flsa.hpp"
#include "mfl/parallel.hpp"

namespace mfl {

namespace {

void check_config(const SolverConfig& cfg) {
  if (cfg.max_iters < 1 || cfg.max_backtracks < 1 || !(cfg.tau0 > 0.0) ||
      !(cfg.gamma > 0.0 && cfg.gamma < 1.0) || !(cfg.epsilon > 0.0)) {
    throw std::invalid_argument("solver: invalid configuration");
  }
}

struct BacktrackOutcome {
  double tau = 0.0;
  int shrinks = 0;
  Coefficients next;
  double smooth_next = 0.0;
};

// Evaluates the sufficient-decrease condition with the generalized gradient
// assembled exactly as the update defines it: the intercept block is the raw
// gradient, the slope block is (current - prox)/tau.
BacktrackOutcome backtrack(const Coefficients& coeffs, const PanelData& data,
                           const PenaltyParams& params,
                           const SolverConfig& cfg, const Coefficients& grad,
                           double smooth_cur) {
  double tau = cfg.tau0;
  for (int shrinks = 0;; ++shrinks) {
    Coefficients next = prox_step(coeffs, grad, tau, params);
    double inner = 0.0, norm_sq = 0.0;
    for (size_t i = 0; i < grad.beta0.size(); ++i) {
      const double gi = grad.beta0[i];
      inner += gi * gi;
      norm_sq += gi * gi;
    }
    for (size_t i = 0; i < grad.beta.size(); ++i) {
      const double gi = (coeffs.beta[i] - next.beta[i]) / tau;
      inner += grad.beta[i] * gi;
      norm_sq += gi * gi;
    }
    const double smooth_next = scaled_nll(next, data);
    if (!(smooth_next > smooth_cur - tau * inner + 0.5 * tau * norm_sq)) {
      return {tau, shrinks, std::move(next), smooth_next};
    }
    if (shrinks >= cfg.max_backtracks) {
      throw StepSizeError("solver: backtracking exhausted its shrink budget",
                          tau);
    }
    tau *= cfg.gamma;
  }
}

double iterate_distance(const Coefficients& a, const Coefficients& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.beta0.size(); ++i) {
    const double d = a.beta0[i] - b.beta0[i];
    s += d * d;
  }
  for (size_t i = 0; i < a.beta.size(); ++i) {
    const double d = a.beta[i] - b.beta[i];
    s += d * d;
  }
  return std::sqrt(s);
}

double iterate_norm(const Coefficients& a) {
  double s = 0.0;
  for (double v : a.beta0) s += v * v;
  for (double v : a.beta) s += v * v;
  return std::sqrt(s);
}

}  // namespace

Coefficients prox_step(const Coefficients& coeffs, const Coefficients& grad,
                       double tau, const PenaltyParams& params) {
  if (!(tau > 0.0)) throw std::invalid_argument("prox_step: tau must be > 0");
  if (!coeffs.same_shape(grad)) {
    throw std::invalid_argument("prox_step: shape mismatch");
  }
  Coefficients out = coeffs;
  for (size_t i = 0; i < out.beta0.size(); ++i) {
    out.beta0[i] = coeffs.beta0[i] - tau * grad.beta0[i];
  }
  const double l1 = tau * params.lam1;
  const double l2 = tau * params.lam2;
  const int T = coeffs.T;
  // one fused-lasso subproblem per (predictor, class) trajectory
  parallel_for(coeffs.p * (coeffs.K - 1), [&](int task) {
    const int j = task % coeffs.p;
    const int k = task / coeffs.p;
    std::vector<double> v(static_cast<size_t>(T));
    for (int t = 0; t < T; ++t) {
      v[size_t(t)] = coeffs.b(j, t, k) - tau * grad.b(j, t, k);
    }
    const auto w = flsa_solve(v, l1, l2);
    for (int t = 0; t < T; ++t) out.b(j, t, k) = w[size_t(t)];
  });
  return out;
}

Coefficients generalized_gradient(const Coefficients& coeffs,
                                  const Coefficients& grad, double tau,
                                  const PenaltyParams& params) {
  const Coefficients next = prox_step(coeffs, grad, tau, params);
  Coefficients g = grad;  // intercept block is the raw gradient
  for (size_t i = 0; i < g.beta.size(); ++i) {
    g.beta[i] = (coeffs.beta[i] - next.beta[i]) / tau;
  }
  return g;
}

double backtracking_search(const Coefficients& coeffs, const PanelData& data,
                           const PenaltyParams& params,
                           const SolverConfig& config) {
  check_config(config);
  const Coefficients grad = gradient(coeffs, data);
  const double smooth_cur = scaled_nll(coeffs, data);
  return backtrack(coeffs, data, params, config, grad, smooth_cur).tau;
}

FitResult fit(const PanelData& data, const PenaltyParams& params,
              const SolverConfig& config, const Coefficients* init) {
  check_config(config);
  if (!std::isfinite(params.lam1) || params.lam1 < 0.0 ||
      !std::isfinite(params.lam2) || params.lam2 < 0.0) {
    throw std::invalid_argument("fit: penalty weights must be nonnegative");
  }

  FitResult result;
  Coefficients cur =
      init ? *init : Coefficients::zeros(data.p, data.T, data.K);
  if (init && !(init->p == data.p && init->T == data.T && init->K == data.K)) {
    throw std::invalid_argument("fit: init shape mismatch");
  }

  double f_cur = objective(cur, data, params);
  double smooth_cur = f_cur - penalty_value(cur, params);
  result.objective_trace.push_back(f_cur);

  double criterion = std::numeric_limits<double>::infinity();
  for (int s = 1; s <= config.max_iters; ++s) {
    const Coefficients grad = gradient(cur, data);
    auto bt = backtrack(cur, data, params, config, grad, smooth_cur);
    const double f_next = bt.smooth_next + penalty_value(bt.next, params);
    if (!std::isfinite(f_next)) {
      throw DivergedError("fit: objective became non-finite");
    }

    if (config.stop_rule == StopRule::objective_relative) {
      const double diff = std::fabs(f_next - f_cur);
      criterion = f_cur != 0.0 ? diff / f_cur : diff;
    } else {
      const double dist = iterate_distance(bt.next, cur);
      const double base = iterate_norm(cur);
      criterion = base != 0.0 ? dist / base : dist;
    }

    cur = std::move(bt.next);
    f_cur = f_next;
    smooth_cur = bt.smooth_next;
    result.objective_trace.push_back(f_cur);
    result.step_sizes.push_back(bt.tau);
    result.iterations_run = s;
    if (criterion <= config.epsilon) {
      result.converged = true;
      break;
    }
  }
  result.final_criterion_value = criterion;
  result.coefficients = std::move(cur);
  return result;
}

}  // namespace mfl

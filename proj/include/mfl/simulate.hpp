#pragma once

#include <cstdint>
#include <vector>

#include "mfl/model.hpp"

namespace mfl {

// Piecewise-constant segment of a true coefficient trajectory; times are
// 1-based and inclusive, matching how designs are written down.
struct Segment {
  int t_begin = 1;
  int t_end = 1;
  double value = 0.0;
};

struct TrueTrajectory {
  int predictor = 1;  // 1-based
  int class_k = 1;    // 1-based, in 1..K-1
  std::vector<Segment> segments;
};

// Synthetic longitudinal design: i.i.d. standard normal predictors and
// outcomes drawn from the multinomial model under the given trajectories.
// All individuals are fully observed.
struct SimConfig {
  int n = 50;
  int T = 15;
  int K = 2;
  int p = 30;
  std::uint64_t seed = 1;
  std::vector<TrueTrajectory> trajectories;  // empty -> default_trajectories()
  std::vector<double> intercepts;            // per class, constant in t; empty -> 0
  bool use_default_trajectories = true;
};

// Three active predictors with one or two segments each, anchored on the
// last three predictor indices; breakpoints fall at T/3 and 2T/3 (timepoints
// 5 and 10 of the default 15).
std::vector<TrueTrajectory> default_trajectories(int p = 30, int T = 15);

struct Simulated {
  PanelData data;
  Coefficients truth;
};

Simulated generate(const SimConfig& config);

Coefficients true_coefficients(const SimConfig& config);

// Fraction of observed test cells whose predicted class differs from the
// drawn outcome. train pins the expected shape; mismatches raise
// EvaluationError.
double evaluate(const PanelData& train, const PanelData& test,
                const Coefficients& coeffs);

}  // namespace mfl

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "mfl/model.hpp"
#include "mfl/solver.hpp"

namespace mfl {

struct ImportanceConfig {
  int replicates = 4;
  double fraction = 0.75;      // individuals per subsample, no replacement
  bool inner_selection = true; // cross-validate (lam1, lam2) per replicate
  std::uint64_t seed = 0;
  PenaltyParams fixed;         // used when inner_selection is false
  int inner_folds = 4;
  int grid_n1 = 5;
  int grid_n2 = 5;
  // reuse the cross-validation training sets as the subsamples instead of
  // fresh draws; replicates then plays the role of the fold count
  bool reuse_cv_folds = false;
  SolverConfig solver;
};

struct ReplicateSummary {
  std::pair<double, double> chosen{0.0, 0.0};
  int nonzero_slopes = 0;
  double max_abs_slope = 0.0;
};

struct ImportanceResult {
  int p = 0;
  int K = 2;
  std::vector<double> importance;  // (j,k) -> j*(K-1) + k
  std::vector<double> relative;    // scaled so the max is 100
  std::vector<ReplicateSummary> replicates;

  double at(int j, int k) const {
    return importance[size_t(j) * size_t(K - 1) + size_t(k)];
  }

  // columns predictor,class,importance,relative_importance, descending
  void write_csv(std::ostream& out,
                 const std::vector<std::string>& predictor_names,
                 const std::vector<std::string>& class_labels) const;
};

// Average absolute slope over replicates and timepoints: the importance of
// variable j for class k. Deterministic given the seed; replicates run in
// parallel on streams derived from (seed, replicate).
ImportanceResult importance(const PanelData& data,
                            const ImportanceConfig& config);

// The aggregation step alone: I = (1/(R*T)) * sum_r sum_t |beta|.
std::vector<double> aggregate_importance(std::span<const Coefficients> fits);

// Scales entries by 100/max; all-zero input stays all-zero.
std::vector<double> relative_importance(const std::vector<double>& importance);

}  // namespace mfl

#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "mfl/model.hpp"
#include "mfl/solver.hpp"

namespace mfl {

// Ordered tuning-parameter pairs plus the generation metadata needed to
// reproduce them. Pairs are grouped by lam2 with lam1 descending inside each
// group so warm starts flow from sparse to dense fits.
struct Grid {
  std::vector<std::pair<double, double>> pairs;
  double lam1_max = 0.0;
  double lam2_max = 0.0;
  int n1 = 0;
  int n2 = 0;
  std::string spacing = "log";
};

struct SelectionEntry {
  double lam1 = 0.0;
  double lam2 = 0.0;
  double cv_mean = std::numeric_limits<double>::quiet_NaN();
  double cv_se = std::numeric_limits<double>::quiet_NaN();
  double aic_nll = std::numeric_limits<double>::quiet_NaN();
  double bic_nll = std::numeric_limits<double>::quiet_NaN();
  double aic_misclass = std::numeric_limits<double>::quiet_NaN();
  double bic_misclass = std::numeric_limits<double>::quiet_NaN();
  int df = -1;
  double objective = std::numeric_limits<double>::quiet_NaN();
};

struct SelectionTable {
  std::vector<SelectionEntry> entries;
  int folds = 0;
  std::uint64_t seed = 0;
  // in-sample losses feeding AIC/BIC: unscaled negative log likelihood and
  // the raw misclassification count
  std::string loss_note = "nll=unscaled-sum; misclass=unscaled-count";

  void write_csv(std::ostream& out) const;
};

enum class SelectRule {
  cv_min,
  cv_one_se,
  aic_nll,
  bic_nll,
  aic_misclass,
  bic_misclass,
};

enum class LossKind { nll, misclass };

// Smallest lam1 at which the slope tensor is entirely zero for any lam2:
// the max absolute slope-gradient entry of the scaled loss at the
// intercept-only optimum (evaluated through its empirical-frequency limit,
// which stays finite when a class is locally absent).
double lambda1_max(const PanelData& data);

// n1 lam1 values log-spaced over [lam1_max*1e-3, lam1_max] and n2 lam2
// values log-spaced over [lam1_max*1e-3, 10*lam1_max], both descending.
Grid make_grid(const PanelData& data, int n1, int n2);

// T(K-1) free intercepts plus, per slope trajectory, the number of maximal
// runs of consecutive timepoints equal within tol and nonzero beyond tol.
int count_df(const Coefficients& coeffs, double tol = 1e-6);

// AIC = 2*loss + 2*df, BIC = 2*loss + log(N_tot)*df with N_tot the number of
// observed cells.
std::pair<double, double> information_criteria(const FitResult& fit,
                                               const PanelData& data,
                                               LossKind loss_kind);

// Per-fold train/held-out pair; the provider owns fold-aware preprocessing.
struct FoldData {
  PanelData train;
  PanelData heldout;
};

// Individual-level fold assignment by seeded shuffle; depends only on
// (seed, n, folds).
std::vector<int> fold_assignment(int n, int folds, std::uint64_t seed);

// Misclassification CV over an arbitrary fold provider. Fits are warm-started
// along each lam2 group; folds (times groups) run in parallel with
// deterministic assembly.
SelectionTable cross_validate_with(
    const Grid& grid, int folds,
    const std::function<FoldData(int)>& make_fold,
    const SolverConfig& config = {});

// Fold provider over an in-memory panel: slices individuals and refits the
// standardization on each training part (pooled over its observed cells),
// replaying it on the held-out part.
SelectionTable cross_validate(const PanelData& data, const Grid& grid,
                              int folds, std::uint64_t seed,
                              const SolverConfig& config = {},
                              bool refit_standardization = true);

// Fills df, information criteria, and the fitted objective per pair from
// warm-started fits on the full data.
void fill_criteria_columns(SelectionTable& table, const PanelData& data,
                           const Grid& grid, const SolverConfig& config = {});

// cross_validate plus full-data warm-started fits per pair filling df,
// information criteria, and the fitted objective.
SelectionTable compute_selection_table(const PanelData& data, const Grid& grid,
                                       int folds, std::uint64_t seed,
                                       const SolverConfig& config = {});

// Applies a selection rule; ties break toward larger lam1 then larger lam2.
std::pair<double, double> select(const SelectionTable& table, SelectRule rule);

}  // namespace mfl

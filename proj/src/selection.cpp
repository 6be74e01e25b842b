#include "mfl/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "mfl/errors.hpp"
#include "mfl/io.hpp"
#include "mfl/parallel.hpp"
#include "mfl/rng.hpp"

namespace mfl {

double lambda1_max(const PanelData& data) {
  // classes must exist somewhere, otherwise the intercept-only optimum and
  // the path anchor are meaningless
  std::vector<long> class_total(size_t(data.K), 0);
  for (int t = 0; t < data.T; ++t) {
    for (int i : data.observed[size_t(t)]) {
      ++class_total[size_t(data.y_at(i, t) - 1)];
    }
  }
  for (int k = 0; k < data.K; ++k) {
    if (class_total[size_t(k)] == 0) {
      throw SelectionError("lambda1_max: class '" +
                           data.class_labels[size_t(k)] +
                           "' is absent at every timepoint");
    }
  }

  // slope gradient of the scaled loss at the intercept-only optimum, where
  // the fitted probabilities equal the per-timepoint class frequencies
  double best = 0.0;
  std::vector<double> acc(size_t(data.p) * size_t(data.K - 1));
  for (int t = 0; t < data.T; ++t) {
    const auto& idx = data.observed[size_t(t)];
    if (idx.empty()) continue;
    const double inv = 1.0 / double(idx.size());
    std::vector<double> freq(size_t(data.K - 1), 0.0);
    for (int i : idx) {
      const int label = data.y_at(i, t);
      if (label <= data.K - 1) freq[size_t(label - 1)] += inv;
    }
    std::fill(acc.begin(), acc.end(), 0.0);
    for (int i : idx) {
      const auto xi = data.x_at(i, t);
      const int label = data.y_at(i, t);
      for (int k = 0; k < data.K - 1; ++k) {
        const double r = (freq[size_t(k)] - (label == k + 1 ? 1.0 : 0.0)) * inv;
        double* a = acc.data() + size_t(k) * size_t(data.p);
        for (int j = 0; j < data.p; ++j) a[j] += r * xi[size_t(j)];
      }
    }
    for (double v : acc) best = std::max(best, std::fabs(v));
  }
  return best;
}

namespace {

std::vector<double> log_spaced_desc(double hi, double lo, int count) {
  std::vector<double> out(static_cast<size_t>(count));
  if (count == 1) {
    out[0] = hi;
    return out;
  }
  const double ratio = std::log(lo / hi) / double(count - 1);
  for (int i = 0; i < count; ++i) out[size_t(i)] = hi * std::exp(ratio * i);
  return out;
}

}  // namespace

Grid make_grid(const PanelData& data, int n1, int n2) {
  if (n1 < 1 || n2 < 1) {
    throw std::invalid_argument("make_grid: counts must be >= 1");
  }
  const double l1max = lambda1_max(data);
  if (!(l1max > 0.0) || !std::isfinite(l1max)) {
    throw SelectionError("make_grid: lambda1_max is degenerate");
  }
  Grid grid;
  grid.lam1_max = l1max;
  grid.lam2_max = 10.0 * l1max;
  grid.n1 = n1;
  grid.n2 = n2;
  const auto l1 = log_spaced_desc(l1max, l1max * 1e-3, n1);
  const auto l2 = log_spaced_desc(10.0 * l1max, l1max * 1e-3, n2);
  for (double lam2 : l2) {
    for (double lam1 : l1) grid.pairs.emplace_back(lam1, lam2);
  }
  return grid;
}

int count_df(const Coefficients& coeffs, double tol) {
  if (tol < 0.0) throw std::invalid_argument("count_df: tol must be >= 0");
  int df = coeffs.T * (coeffs.K - 1);
  for (int k = 0; k < coeffs.K - 1; ++k) {
    for (int j = 0; j < coeffs.p; ++j) {
      int start = 0;
      for (int t = 1; t <= coeffs.T; ++t) {
        const bool boundary =
            t == coeffs.T ||
            std::fabs(coeffs.b(j, t, k) - coeffs.b(j, t - 1, k)) > tol;
        if (boundary) {
          if (std::fabs(coeffs.b(j, start, k)) > tol) ++df;
          start = t;
        }
      }
    }
  }
  return df;
}

std::pair<double, double> information_criteria(const FitResult& fit,
                                               const PanelData& data,
                                               LossKind loss_kind) {
  const double loss =
      loss_kind == LossKind::nll
          ? unscaled_nll(fit.coefficients, data)
          : double(misclassification_count(fit.coefficients, data));
  const int df = count_df(fit.coefficients);
  const double n_tot = double(data.total_observed());
  const double aic = 2.0 * loss + 2.0 * df;
  const double bic = 2.0 * loss + std::log(n_tot) * df;
  return {aic, bic};
}

std::vector<int> fold_assignment(int n, int folds, std::uint64_t seed) {
  std::vector<int> perm(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) perm[size_t(i)] = i;
  Rng rng(seed);
  rng.shuffle(perm);
  std::vector<int> fold(static_cast<size_t>(n));
  for (int pos = 0; pos < n; ++pos) fold[size_t(perm[size_t(pos)])] = pos % folds;
  return fold;
}

namespace {

// consecutive runs of pairs sharing lam2; warm starts chain inside a run
std::vector<std::pair<int, int>> lam2_groups(const Grid& grid) {
  std::vector<std::pair<int, int>> groups;
  const int total = int(grid.pairs.size());
  int begin = 0;
  for (int i = 1; i <= total; ++i) {
    if (i == total || grid.pairs[size_t(i)].second != grid.pairs[size_t(begin)].second) {
      groups.emplace_back(begin, i);
      begin = i;
    }
  }
  return groups;
}

PanelData slice_panel(const PanelData& data, const std::vector<int>& keep) {
  PanelData out;
  out.n = int(keep.size());
  out.p = data.p;
  out.T = data.T;
  out.K = data.K;
  out.class_labels = data.class_labels;
  out.predictor_names = data.predictor_names;
  out.y.assign(size_t(out.n) * size_t(out.T), 0);
  out.x.assign(size_t(out.n) * size_t(out.T) * size_t(out.p), 0.0);
  for (int dst = 0; dst < out.n; ++dst) {
    const int src = keep[size_t(dst)];
    out.ids.push_back(data.ids[size_t(src)]);
    for (int t = 0; t < data.T; ++t) {
      out.y_at(dst, t) = data.y_at(src, t);
      auto to = out.x_at(dst, t);
      const auto from = data.x_at(src, t);
      std::copy(from.begin(), from.end(), to.begin());
    }
  }
  out.finalize();
  return out;
}

// mean/sd over observed cells of the training slice, applied to both slices;
// constant columns zero out
void restandardize(PanelData& train, PanelData& heldout) {
  for (int j = 0; j < train.p; ++j) {
    double sum = 0.0, lo = 0.0, hi = 0.0;
    size_t count = 0;
    for (int t = 0; t < train.T; ++t) {
      for (int i : train.observed[size_t(t)]) {
        const double v = train.x_at(i, t)[size_t(j)];
        if (count == 0) {
          lo = hi = v;
        } else {
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
        sum += v;
        ++count;
      }
    }
    if (count == 0) continue;
    const double mean = sum / double(count);
    double sd = 0.0;
    if (lo != hi) {
      double ss = 0.0;
      for (int t = 0; t < train.T; ++t) {
        for (int i : train.observed[size_t(t)]) {
          const double d = train.x_at(i, t)[size_t(j)] - mean;
          ss += d * d;
        }
      }
      sd = std::sqrt(ss / double(count));
    }
    auto transform = [&](PanelData& panel) {
      for (int i = 0; i < panel.n; ++i) {
        for (int t = 0; t < panel.T; ++t) {
          double& v = panel.x_at(i, t)[size_t(j)];
          v = sd == 0.0 ? 0.0 : (v - mean) / sd;
        }
      }
    };
    transform(train);
    transform(heldout);
  }
}

}  // namespace

SelectionTable cross_validate_with(
    const Grid& grid, int folds,
    const std::function<FoldData(int)>& make_fold, const SolverConfig& config) {
  if (folds < 2) throw std::invalid_argument("cross_validate: folds must be >= 2");
  if (grid.pairs.empty()) throw SelectionError("cross_validate: empty grid");

  std::vector<FoldData> fold_data;
  fold_data.reserve(size_t(folds));
  for (int f = 0; f < folds; ++f) {
    fold_data.push_back(make_fold(f));
    if (fold_data.back().heldout.total_observed() == 0) {
      throw SelectionError("cross_validate: fold " + std::to_string(f) +
                           " has no held-out observations");
    }
  }

  const auto groups = lam2_groups(grid);
  const int n_pairs = int(grid.pairs.size());
  std::vector<double> err(size_t(n_pairs) * size_t(folds), 0.0);
  parallel_for(folds * int(groups.size()), [&](int task) {
    const int f = task / int(groups.size());
    const auto [begin, end] = groups[size_t(task % int(groups.size()))];
    const FoldData& fd = fold_data[size_t(f)];
    Coefficients warm = Coefficients::zeros(fd.train.p, fd.train.T, fd.train.K);
    for (int idx = begin; idx < end; ++idx) {
      const auto [lam1, lam2] = grid.pairs[size_t(idx)];
      const FitResult res = fit(fd.train, {lam1, lam2}, config, &warm);
      warm = res.coefficients;
      err[size_t(idx) * size_t(folds) + size_t(f)] =
          misclassification_rate(res.coefficients, fd.heldout);
    }
  });

  SelectionTable table;
  table.folds = folds;
  for (int idx = 0; idx < n_pairs; ++idx) {
    SelectionEntry e;
    e.lam1 = grid.pairs[size_t(idx)].first;
    e.lam2 = grid.pairs[size_t(idx)].second;
    double mean = 0.0;
    for (int f = 0; f < folds; ++f) mean += err[size_t(idx) * size_t(folds) + size_t(f)];
    mean /= double(folds);
    double ss = 0.0;
    for (int f = 0; f < folds; ++f) {
      const double d = err[size_t(idx) * size_t(folds) + size_t(f)] - mean;
      ss += d * d;
    }
    e.cv_mean = mean;
    e.cv_se = std::sqrt(ss / double(folds - 1)) / std::sqrt(double(folds));
    table.entries.push_back(e);
  }
  return table;
}

SelectionTable cross_validate(const PanelData& data, const Grid& grid,
                              int folds, std::uint64_t seed,
                              const SolverConfig& config,
                              bool refit_standardization) {
  const auto assignment = fold_assignment(data.n, folds, seed);
  auto make_fold = [&](int f) {
    std::vector<int> train_idx, held_idx;
    for (int i = 0; i < data.n; ++i) {
      (assignment[size_t(i)] == f ? held_idx : train_idx).push_back(i);
    }
    FoldData fd{slice_panel(data, train_idx), slice_panel(data, held_idx)};
    // the training part must still carry every class
    std::vector<long> totals(size_t(data.K), 0);
    for (int t = 0; t < fd.train.T; ++t) {
      for (int i : fd.train.observed[size_t(t)]) {
        ++totals[size_t(fd.train.y_at(i, t) - 1)];
      }
    }
    for (int k = 0; k < data.K; ++k) {
      if (totals[size_t(k)] == 0) {
        throw SelectionError("cross_validate: fold " + std::to_string(f) +
                             " training part lost class '" +
                             data.class_labels[size_t(k)] + "'");
      }
    }
    if (refit_standardization) restandardize(fd.train, fd.heldout);
    return fd;
  };
  SelectionTable table = cross_validate_with(grid, folds, make_fold, config);
  table.seed = seed;
  return table;
}

void fill_criteria_columns(SelectionTable& table, const PanelData& data,
                           const Grid& grid, const SolverConfig& config) {
  if (table.entries.size() != grid.pairs.size()) {
    throw SelectionError("fill_criteria_columns: table/grid size mismatch");
  }
  const auto groups = lam2_groups(grid);
  parallel_for(int(groups.size()), [&](int g) {
    const auto [begin, end] = groups[size_t(g)];
    Coefficients warm = Coefficients::zeros(data.p, data.T, data.K);
    for (int idx = begin; idx < end; ++idx) {
      const auto [lam1, lam2] = grid.pairs[size_t(idx)];
      const FitResult res = fit(data, {lam1, lam2}, config, &warm);
      warm = res.coefficients;
      auto& e = table.entries[size_t(idx)];
      e.df = count_df(res.coefficients);
      std::tie(e.aic_nll, e.bic_nll) =
          information_criteria(res, data, LossKind::nll);
      std::tie(e.aic_misclass, e.bic_misclass) =
          information_criteria(res, data, LossKind::misclass);
      e.objective = res.objective_trace.back();
    }
  });
}

SelectionTable compute_selection_table(const PanelData& data, const Grid& grid,
                                       int folds, std::uint64_t seed,
                                       const SolverConfig& config) {
  SelectionTable table = cross_validate(data, grid, folds, seed, config);
  fill_criteria_columns(table, data, grid, config);
  return table;
}

namespace {

// ties break toward larger lam1, then larger lam2
bool tie_better(const SelectionEntry& a, const SelectionEntry& b) {
  if (a.lam1 != b.lam1) return a.lam1 > b.lam1;
  return a.lam2 > b.lam2;
}

const SelectionEntry& argmin_score(const SelectionTable& table,
                                   double SelectionEntry::* score,
                                   const char* what) {
  const SelectionEntry* best = nullptr;
  for (const auto& e : table.entries) {
    const double s = e.*score;
    if (std::isnan(s)) {
      throw SelectionError(std::string("select: table missing ") + what);
    }
    if (!best || s < best->*score ||
        (s == best->*score && tie_better(e, *best))) {
      best = &e;
    }
  }
  return *best;
}

}  // namespace

std::pair<double, double> select(const SelectionTable& table, SelectRule rule) {
  if (table.entries.empty()) throw SelectionError("select: empty table");
  switch (rule) {
    case SelectRule::cv_min: {
      const auto& e = argmin_score(table, &SelectionEntry::cv_mean, "cv columns");
      return {e.lam1, e.lam2};
    }
    case SelectRule::cv_one_se: {
      const auto& at_min =
          argmin_score(table, &SelectionEntry::cv_mean, "cv columns");
      const double threshold = at_min.cv_mean + at_min.cv_se;
      const SelectionEntry* best = nullptr;
      for (const auto& e : table.entries) {
        if (e.cv_mean > threshold) continue;
        if (e.df < 0) throw SelectionError("select: table missing df column");
        if (!best || e.df < best->df ||
            (e.df == best->df && tie_better(e, *best))) {
          best = &e;
        }
      }
      return {best->lam1, best->lam2};
    }
    case SelectRule::aic_nll: {
      const auto& e = argmin_score(table, &SelectionEntry::aic_nll, "aic_nll");
      return {e.lam1, e.lam2};
    }
    case SelectRule::bic_nll: {
      const auto& e = argmin_score(table, &SelectionEntry::bic_nll, "bic_nll");
      return {e.lam1, e.lam2};
    }
    case SelectRule::aic_misclass: {
      const auto& e =
          argmin_score(table, &SelectionEntry::aic_misclass, "aic_misclass");
      return {e.lam1, e.lam2};
    }
    case SelectRule::bic_misclass: {
      const auto& e =
          argmin_score(table, &SelectionEntry::bic_misclass, "bic_misclass");
      return {e.lam1, e.lam2};
    }
  }
  throw SelectionError("select: unknown rule");
}

void SelectionTable::write_csv(std::ostream& out) const {
  out << "lam1,lam2,cv_mean,cv_se,aic_nll,bic_nll,aic_misclass,bic_misclass,"
         "df,objective\n";
  for (const auto& e : entries) {
    out << format_double(e.lam1) << ',' << format_double(e.lam2) << ','
        << format_double(e.cv_mean) << ',' << format_double(e.cv_se) << ','
        << format_double(e.aic_nll) << ',' << format_double(e.bic_nll) << ','
        << format_double(e.aic_misclass) << ',' << format_double(e.bic_misclass)
        << ',' << e.df << ',' << format_double(e.objective) << '\n';
  }
}

}  // namespace mfl

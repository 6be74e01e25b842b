#include "mfl/stability.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "mfl/errors.hpp"
#include "mfl/io.hpp"
#include "mfl/parallel.hpp"
#include "mfl/rng.hpp"
#include "mfl/selection.hpp"

namespace mfl {

namespace {

PanelData take_individuals(const PanelData& data, const std::vector<int>& keep) {
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
      const auto from = data.x_at(src, t);
      std::copy(from.begin(), from.end(), out.x_at(dst, t).begin());
    }
  }
  out.finalize();
  return out;
}

std::vector<int> draw_subsample(const PanelData& data, int m, Rng rng) {
  std::vector<int> idx(static_cast<size_t>(data.n));
  for (int i = 0; i < data.n; ++i) idx[size_t(i)] = i;
  rng.shuffle(idx);
  idx.resize(size_t(m));
  std::sort(idx.begin(), idx.end());
  return idx;
}

void check_classes(const PanelData& sub, const PanelData& full, int replicate) {
  std::vector<long> totals(size_t(full.K), 0);
  for (int t = 0; t < sub.T; ++t) {
    for (int i : sub.observed[size_t(t)]) ++totals[size_t(sub.y_at(i, t) - 1)];
  }
  for (int k = 0; k < full.K; ++k) {
    if (totals[size_t(k)] == 0) {
      throw ImportanceError("importance: replicate " + std::to_string(replicate) +
                            " lost class '" + full.class_labels[size_t(k)] + "'");
    }
  }
}

}  // namespace

std::vector<double> aggregate_importance(std::span<const Coefficients> fits) {
  if (fits.empty()) return {};
  const int p = fits[0].p;
  const int K1 = fits[0].K - 1;
  const int T = fits[0].T;
  std::vector<double> acc(size_t(p) * size_t(K1), 0.0);
  for (const auto& c : fits) {
    for (int k = 0; k < K1; ++k) {
      for (int j = 0; j < p; ++j) {
        double s = 0.0;
        for (int t = 0; t < T; ++t) s += std::fabs(c.b(j, t, k));
        acc[size_t(j) * size_t(K1) + size_t(k)] += s;
      }
    }
  }
  const double scale = 1.0 / (double(fits.size()) * double(T));
  for (auto& v : acc) v *= scale;
  return acc;
}

std::vector<double> relative_importance(const std::vector<double>& importance) {
  double mx = 0.0;
  for (double v : importance) mx = std::max(mx, v);
  std::vector<double> out(importance.size(), 0.0);
  if (mx <= 0.0) return out;
  for (size_t i = 0; i < importance.size(); ++i) {
    out[i] = importance[i] * 100.0 / mx;
  }
  return out;
}

ImportanceResult importance(const PanelData& data,
                            const ImportanceConfig& config) {
  if (config.replicates < 1) {
    throw std::invalid_argument("importance: replicates must be >= 1");
  }
  if (!(config.fraction > 0.0) || config.fraction > 1.0) {
    throw std::invalid_argument("importance: fraction must be in (0, 1]");
  }
  const int m = int(std::ceil(config.fraction * data.n));
  if (m < 1) throw std::invalid_argument("importance: empty subsample");

  const int R = config.replicates;
  const Rng base(config.seed);
  std::vector<int> cv_assignment;
  if (config.reuse_cv_folds) {
    cv_assignment = fold_assignment(data.n, R, config.seed);
  }

  std::vector<Coefficients> fits(static_cast<size_t>(R));
  std::vector<ReplicateSummary> summaries(static_cast<size_t>(R));
  parallel_for(R, [&](int r) {
    std::vector<int> keep;
    if (config.reuse_cv_folds) {
      for (int i = 0; i < data.n; ++i) {
        if (cv_assignment[size_t(i)] != r) keep.push_back(i);
      }
    } else {
      keep = draw_subsample(data, m, base.child(std::uint64_t(r)));
    }
    const PanelData sub = take_individuals(data, keep);
    check_classes(sub, data, r);

    PenaltyParams chosen = config.fixed;
    if (config.inner_selection) {
      const Grid grid = make_grid(sub, config.grid_n1, config.grid_n2);
      const SelectionTable table =
          cross_validate(sub, grid, config.inner_folds,
                         base.child(0x5eed0000ULL + std::uint64_t(r)).next(),
                         config.solver);
      const auto pick = select(table, SelectRule::cv_min);
      chosen = {pick.first, pick.second};
    }
    const FitResult res = fit(sub, chosen, config.solver);
    fits[size_t(r)] = res.coefficients;

    ReplicateSummary s;
    s.chosen = {chosen.lam1, chosen.lam2};
    for (double v : res.coefficients.beta) {
      if (v != 0.0) ++s.nonzero_slopes;
      s.max_abs_slope = std::max(s.max_abs_slope, std::fabs(v));
    }
    summaries[size_t(r)] = s;
  });

  ImportanceResult result;
  result.p = data.p;
  result.K = data.K;
  result.importance = aggregate_importance(fits);
  result.relative = relative_importance(result.importance);
  result.replicates = std::move(summaries);
  return result;
}

void ImportanceResult::write_csv(
    std::ostream& out, const std::vector<std::string>& predictor_names,
    const std::vector<std::string>& class_labels) const {
  struct Row {
    int j, k;
    double imp, rel;
  };
  std::vector<Row> rows;
  for (int j = 0; j < p; ++j) {
    for (int k = 0; k < K - 1; ++k) {
      rows.push_back({j, k, at(j, k),
                      relative[size_t(j) * size_t(K - 1) + size_t(k)]});
    }
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (a.imp != b.imp) return a.imp > b.imp;
    if (a.j != b.j) return a.j < b.j;
    return a.k < b.k;
  });
  out << "predictor,class,importance,relative_importance\n";
  for (const auto& r : rows) {
    out << predictor_names[size_t(r.j)] << ',' << class_labels[size_t(r.k)]
        << ',' << format_double(r.imp) << ',' << format_double(r.rel) << '\n';
  }
}

}  // namespace mfl

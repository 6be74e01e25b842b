// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Runs single-threaded; the heavyweight sections share one 30-rep
// benchmark loop.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mfl/data.hpp"
#include "mfl/flsa.hpp"
#include "mfl/io.hpp"
#include "mfl/model.hpp"
#include "mfl/parallel.hpp"
#include "mfl/rng.hpp"
#include "mfl/selection.hpp"
#include "mfl/simulate.hpp"
#include "mfl/solver.hpp"

using namespace mfl;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] %s: %s\n", pass ? "PASS" : "FAIL", name.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

PanelData random_panel(Rng& rng, int n, int p, int T, int K,
                       double missing_prob) {
  PanelData d;
  d.n = n;
  d.p = p;
  d.T = T;
  d.K = K;
  d.y.assign(size_t(n) * size_t(T), 0);
  d.x.assign(size_t(n) * size_t(T) * size_t(p), 0.0);
  for (int i = 0; i < n; ++i) {
    for (int t = 0; t < T; ++t) {
      d.y_at(i, t) = rng.uniform() < missing_prob ? 0 : 1 + rng.below(K);
      for (auto& v : d.x_at(i, t)) v = rng.normal();
    }
  }
  d.finalize();
  return d;
}

bool trace_monotone(const FitResult& res) {
  for (size_t s = 1; s < res.objective_trace.size(); ++s) {
    if (res.objective_trace[s] > res.objective_trace[s - 1] + 1e-10) {
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------

void criterion_flsa_oracle_and_composition() {
  Rng rng(20250801);
  const auto start = std::chrono::steady_clock::now();
  int kkt_failures = 0;
  double max_comp_err = 0.0;
  for (int rep = 0; rep < 1000; ++rep) {
    FusionProblem p;
    const int m = 1 + rng.below(12);
    p.input.resize(size_t(m));
    for (auto& v : p.input) v = 3.0 * rng.normal();
    p.lam1 = std::exp(std::log(1e-3) +
                      rng.uniform() * (std::log(10.0) - std::log(1e-3)));
    p.lam2 = std::exp(std::log(1e-3) +
                      rng.uniform() * (std::log(10.0) - std::log(1e-3)));

    const auto out = flsa_solve(p);
    if (!flsa_check_kkt(p, out, 1e-6).ok) ++kkt_failures;

    const auto fused = flsa_solve({p.input, 0.0, p.lam2});
    for (size_t i = 0; i < out.size(); ++i) {
      max_comp_err = std::max(
          max_comp_err,
          std::fabs(out[i] - soft_threshold(fused[i], p.lam1)));
    }
  }
  const double elapsed = seconds_since(start);
  {
    std::ostringstream d;
    d << "1000 random problems, " << kkt_failures
      << " KKT failures at tol 1e-6, " << elapsed << " s";
    report("flsa-oracle-equivalence", kkt_failures == 0 && elapsed < 5.0,
           d.str());
  }
  {
    std::ostringstream d;
    d << "max |direct - soft_threshold(fusion-only)| = " << max_comp_err;
    report("soft-threshold-composition", max_comp_err <= 1e-8, d.str());
  }
}

void criterion_gradient() {
  Rng rng(20250802);
  const double h = 1e-5;
  double worst = 0.0;
  for (int inst = 0; inst < 100; ++inst) {
    const int n = 2 + rng.below(9);
    const int p = 1 + rng.below(4);
    const int T = 1 + rng.below(5);
    const int K = 2 + rng.below(2);
    auto d = random_panel(rng, n, p, T, K, 0.25);
    auto c = Coefficients::zeros(p, T, K);
    for (auto& v : c.beta0) v = 0.5 * rng.normal();
    for (auto& v : c.beta) v = 0.5 * rng.normal();

    const auto g = gradient(c, d);
    auto probe = [&](double* slot, double analytic) {
      const double keep = *slot;
      *slot = keep + h;
      const double up = scaled_nll(c, d);
      *slot = keep - h;
      const double dn = scaled_nll(c, d);
      *slot = keep;
      const double fd = (up - dn) / (2.0 * h);
      const double denom = std::max({std::fabs(fd), std::fabs(analytic), 1e-3});
      worst = std::max(worst, std::fabs(fd - analytic) / denom);
    };
    for (int t = 0; t < T; ++t) {
      for (int k = 0; k < K - 1; ++k) {
        probe(&c.b0(t, k), g.b0(t, k));
        for (int j = 0; j < p; ++j) probe(&c.b(j, t, k), g.b(j, t, k));
      }
    }
  }
  std::ostringstream d;
  d << "100 instances, worst relative error " << worst;
  report("gradient-vs-finite-differences", worst <= 1e-5, d.str());
}

void criterion_sparsity_and_fusion(long& monotone_checked, bool& monotone_ok) {
  Rng rng(20250803);
  bool sparse_ok = true, fusion_ok = true;
  std::string sparse_detail, fusion_detail;
  SolverConfig cfg;
  cfg.max_iters = 400;
  cfg.epsilon = 1e-10;
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 15 + rng.below(20);
    const int p = 2 + rng.below(5);
    const int T = 2 + rng.below(4);
    const int K = 2 + rng.below(2);
    const auto d = random_panel(rng, n, p, T, K, 0.1);
    const double lmax = lambda1_max(d);

    const auto above = fit(d, {1.01 * lmax, 0.0}, cfg);
    monotone_ok = monotone_ok && trace_monotone(above);
    ++monotone_checked;
    for (double v : above.coefficients.beta) {
      if (v != 0.0) {
        sparse_ok = false;
        sparse_detail = "nonzero slope at 1.01*lambda1_max (rep " +
                        std::to_string(rep) + ")";
      }
    }
    const auto below = fit(d, {0.9 * lmax, 0.0}, cfg);
    monotone_ok = monotone_ok && trace_monotone(below);
    ++monotone_checked;
    double mx = 0.0;
    for (double v : below.coefficients.beta) mx = std::max(mx, std::fabs(v));
    if (mx == 0.0) {
      sparse_ok = false;
      sparse_detail =
          "all-zero slopes at 0.9*lambda1_max (rep " + std::to_string(rep) + ")";
    }

    // fusion limit at an extreme lam2
    const auto flat = fit(d, {1e-3 * lmax, 1e3 * lmax}, cfg);
    monotone_ok = monotone_ok && trace_monotone(flat);
    ++monotone_checked;
    for (int k = 0; k < K - 1 && fusion_ok; ++k) {
      for (int j = 0; j < p && fusion_ok; ++j) {
        for (int t = 1; t < T; ++t) {
          if (std::fabs(flat.coefficients.b(j, t, k) -
                        flat.coefficients.b(j, t - 1, k)) > 1e-6) {
            fusion_ok = false;
            fusion_detail = "non-constant trajectory at rep " +
                            std::to_string(rep) + " (j=" + std::to_string(j) +
                            ")";
          }
        }
      }
    }
  }
  report("sparsity-threshold",
         sparse_ok, sparse_ok ? "20 datasets bracket lambda1_max" : sparse_detail);
  report("fusion-limit", fusion_ok,
         fusion_ok ? "all trajectories constant at lam2 = 1e3*lambda1_max"
                   : fusion_detail);
}

struct BenchmarkOutcome {
  double reg_mean = 0.0;
  double unreg_mean = 0.0;
  int concentrate = 0;
  int wild = 0;
  bool one_se_dominates = true;
  double elapsed = 0.0;
  long fits_checked = 0;
  bool monotone_ok = true;
};

BenchmarkOutcome run_benchmark() {
  BenchmarkOutcome out;
  const auto start = std::chrono::steady_clock::now();
  // the paper quotes the tuning pair against the unscaled sum-loss; the
  // solver's 1/n_t scaling makes the equivalent pair (2.5/n, 12.5/n)
  const PenaltyParams reg{2.5 / 50.0, 12.5 / 50.0};
  SolverConfig defaults;
  SolverConfig longrun;
  longrun.max_iters = 4000;
  longrun.epsilon = 1e-14;

  for (int rep = 0; rep < 30; ++rep) {
    SimConfig cfg;
    cfg.seed = 1000 + std::uint64_t(rep);
    const auto train = generate(cfg);
    SimConfig test_cfg = cfg;
    test_cfg.seed = 50000 + std::uint64_t(rep);
    const auto test = generate(test_cfg);

    const auto fit_reg = fit(train.data, reg, defaults);
    const auto fit_unreg = fit(train.data, {0.0, 0.0}, defaults);
    out.monotone_ok = out.monotone_ok && trace_monotone(fit_reg) &&
                      trace_monotone(fit_unreg);
    out.fits_checked += 2;
    out.reg_mean += evaluate(train.data, test.data, fit_reg.coefficients);
    out.unreg_mean += evaluate(train.data, test.data, fit_unreg.coefficients);

    // do the three largest-magnitude fitted trajectories sit on the three
    // true predictors?
    std::vector<double> mags(size_t(train.data.p), 0.0);
    for (int j = 0; j < train.data.p; ++j) {
      for (int t = 0; t < train.data.T; ++t) {
        mags[size_t(j)] =
            std::max(mags[size_t(j)], std::fabs(fit_reg.coefficients.b(j, t, 0)));
      }
    }
    int top[3] = {0, 1, 2};
    for (int j = 3; j < train.data.p; ++j) {
      int weakest = 0;
      for (int a = 1; a < 3; ++a) {
        if (mags[size_t(top[a])] < mags[size_t(top[weakest])]) weakest = a;
      }
      if (mags[size_t(j)] > mags[size_t(top[weakest])]) top[weakest] = j;
    }
    bool on_true = true;
    for (int a = 0; a < 3; ++a) {
      if (top[a] < train.data.p - 3) on_true = false;
    }
    if (on_true) ++out.concentrate;

    // iteration-unbounded unregularized fit for the wildness check
    const auto fit_wild = fit(train.data, {0.0, 0.0}, longrun);
    double wild_max = 0.0;
    for (double v : fit_wild.coefficients.beta) {
      wild_max = std::max(wild_max, std::fabs(v));
    }
    double true_max = 0.0;
    for (double v : train.truth.beta) true_max = std::max(true_max, std::fabs(v));
    if (wild_max >= 5.0 * true_max) ++out.wild;

    // selection table for the one-standard-error dominance criterion
    const Grid grid = make_grid(train.data, 3, 3);
    const SelectionTable table =
        compute_selection_table(train.data, grid, 4, 17 + std::uint64_t(rep));
    const auto pick_min = select(table, SelectRule::cv_min);
    const auto pick_1se = select(table, SelectRule::cv_one_se);
    int df_min = -1, df_1se = -1;
    for (const auto& e : table.entries) {
      if (e.lam1 == pick_min.first && e.lam2 == pick_min.second) df_min = e.df;
      if (e.lam1 == pick_1se.first && e.lam2 == pick_1se.second) df_1se = e.df;
    }
    if (df_1se > df_min) out.one_se_dominates = false;
  }
  out.reg_mean /= 30.0;
  out.unreg_mean /= 30.0;
  out.elapsed = seconds_since(start);
  return out;
}

void criterion_df_counting() {
  auto c = Coefficients::zeros(30, 15, 2);
  const int a = count_df(c);
  for (int t = 0; t < 15; ++t) c.b(4, t, 0) = 0.7;
  const int b = count_df(c);
  for (int t = 8; t < 15; ++t) c.b(4, t, 0) = -0.2;
  const int d = count_df(c);
  std::ostringstream detail;
  detail << "blocks: " << a << "/" << b << "/" << d << " (want 15/16/17)";
  report("df-counting", a == 15 && b == 16 && d == 17, detail.str());
}

void criterion_cli_determinism() {
  const fs::path dir =
      fs::temp_directory_path() / ("mfl_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto run = [&](const std::string& args) {
    const std::string cmd = "cd " + dir.string() + " && " + MFL_CLI_BIN + " " +
                            args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) && WEXITSTATUS(status) == 0;
  };
  bool ok = run(
      "simulate --n 30 --t 5 --p 6 --seed 12 --out-data d.csv --out-truth "
      "t.csv --manifest sm.json");
  ok = ok && run(
                 "cv --data d.csv --folds 3 --grid-n1 3 --grid-n2 2 --seed 5 "
                 "--threads 1 --out-table t1.csv --out-chosen c1.json "
                 "--out-coeffs f1.csv --manifest m1.json");
  ok = ok && run(
                 "cv --data d.csv --folds 3 --grid-n1 3 --grid-n2 2 --seed 5 "
                 "--threads 2 --out-table t2.csv --out-chosen c2.json "
                 "--out-coeffs f2.csv --manifest m2.json");
  ok = ok && run(
                 "cv --data d.csv --folds 3 --grid-n1 3 --grid-n2 2 --seed 5 "
                 "--threads 1 --out-table t3.csv --out-chosen c3.json "
                 "--out-coeffs f3.csv --manifest m3.json");
  std::string detail = "cv runs failed";
  if (ok) {
    const auto d1 = file_digest((dir / "t1.csv").string());
    const auto d2 = file_digest((dir / "t2.csv").string());
    const auto d3 = file_digest((dir / "t3.csv").string());
    ok = d1 == d2 && d1 == d3;
    detail = "table digests " + d1 + " / " + d2 + " / " + d3 +
             " (rerun and --threads 2)";
  }
  report("cv-determinism", ok, detail);
  fs::remove_all(dir);
}

void criterion_complexity() {
  auto bundle_time = [&](int n, int p, int T, int K) {
    Rng rng(11 + std::uint64_t(n) * 7 + std::uint64_t(p) * 13 +
            std::uint64_t(T) * 17 + std::uint64_t(K) * 19);
    auto d = random_panel(rng, n, p, T, K, 0.0);
    auto c = Coefficients::zeros(p, T, K);
    for (auto& v : c.beta) v = 0.01 * rng.normal();
    double best = 1e100;
    for (int rep = 0; rep < 3; ++rep) {
      const auto start = std::chrono::steady_clock::now();
      const auto g = gradient(c, d);
      const auto next = prox_step(c, g, 1.0, {0.01, 0.01});
      const double nll = scaled_nll(next, d);
      (void)nll;
      best = std::min(best, seconds_since(start));
    }
    return best;
  };
  const double base = bundle_time(200, 100, 20, 3);
  const double r_n = bundle_time(400, 100, 20, 3) / base;
  const double r_p = bundle_time(200, 200, 20, 3) / base;
  const double r_t = bundle_time(200, 100, 40, 3) / base;
  const double r_k = bundle_time(200, 100, 20, 6) / base;
  const bool ok = r_n >= 1.5 && r_n <= 3.0 && r_p >= 1.5 && r_p <= 3.0 &&
                  r_t >= 1.5 && r_t <= 3.0 && r_k >= 1.5 && r_k <= 3.0;
  std::ostringstream detail;
  detail << "per-iteration cost ratios for doubled n/p/T/K: " << r_n << " / "
         << r_p << " / " << r_t << " / " << r_k << " (band [1.5, 3.0])";
  report("complexity-scaling", ok, detail.str());
}

}  // namespace

int main() {
  set_max_threads(1);
  const auto start = std::chrono::steady_clock::now();

  criterion_flsa_oracle_and_composition();
  criterion_gradient();

  long monotone_checked = 0;
  bool monotone_ok = true;
  criterion_sparsity_and_fusion(monotone_checked, monotone_ok);

  const auto bench = run_benchmark();
  monotone_ok = monotone_ok && bench.monotone_ok;
  monotone_checked += bench.fits_checked;
  {
    std::ostringstream d;
    d << "objective traces nonincreasing (1e-10 slack) across "
      << monotone_checked << " fits";
    report("monotone-descent", monotone_ok, d.str());
  }
  {
    std::ostringstream d;
    d << "mean regularized " << bench.reg_mean << ", unregularized "
      << bench.unreg_mean << ", gap " << bench.reg_mean - bench.unreg_mean
      << " (need <= -0.05, reg <= 0.20; tuning pair 2.5/n, 12.5/n), "
      << bench.elapsed << " s";
    report("benchmark-error-gap",
           bench.reg_mean - bench.unreg_mean <= -0.05 &&
               bench.reg_mean <= 0.20 && bench.elapsed < 600.0,
           d.str());
  }
  {
    std::ostringstream d;
    d << bench.concentrate
      << "/30 repetitions put the top-3 trajectories on the true predictors "
         "(need >= 25)";
    report("support-concentration", bench.concentrate >= 25, d.str());
  }
  {
    std::ostringstream d;
    d << bench.wild
      << "/30 long-run unregularized fits exceed 5x the true max (need > 15)";
    report("unregularized-wildness", bench.wild > 15, d.str());
  }
  report("one-se-dominance", bench.one_se_dominates,
         bench.one_se_dominates
             ? "cv_one_se df <= cv_min df in all 30 repetitions"
             : "a repetition chose more blocks under the one-se rule");

  criterion_df_counting();
  criterion_cli_determinism();
  criterion_complexity();

  std::printf("acceptance: %d failure(s), %.1f s total\n", failures,
              seconds_since(start));
  return failures == 0 ? 0 : 1;
}

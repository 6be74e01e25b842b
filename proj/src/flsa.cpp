#include "mfl/flsa.hpp"

#include <cmath>
#include <stdexcept>

namespace mfl {

namespace {

void validate(const FusionProblem& p) {
  if (p.input.empty()) throw std::invalid_argument("flsa: empty input");
  if (!std::isfinite(p.lam1) || p.lam1 < 0.0 || !std::isfinite(p.lam2) ||
      p.lam2 < 0.0) {
    throw std::invalid_argument(
        "flsa: penalty weights must be finite and nonnegative");
  }
  for (double v : p.input) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("flsa: non-finite input entry");
    }
  }
}

// Fusion-only solve. Forward pass: the derivative of the running message is
// piecewise linear and nondecreasing; it is stored as a sorted sequence of
// knots with (slope, intercept) increments, kept in the middle of a 2m
// buffer so both ends can grow. Clipping the derivative at -lam / +lam each
// step inserts one knot per side and records the clamp thresholds used by
// the backward pass. Each knot enters and leaves the active window at most
// once, so the total cost is O(m).
std::vector<double> fuse_dp(const std::vector<double>& y, double lam) {
  const int m = int(y.size());
  std::vector<double> theta(static_cast<size_t>(m));
  std::vector<double> knot(size_t(2 * m));
  std::vector<double> slope(size_t(2 * m));
  std::vector<double> icept(size_t(2 * m));
  std::vector<double> clip_lo(size_t(m - 1));
  std::vector<double> clip_hi(size_t(m - 1));

  clip_lo[0] = y[0] - lam;
  clip_hi[0] = y[0] + lam;
  int l = m - 1;
  int r = m;
  knot[size_t(l)] = clip_lo[0];
  knot[size_t(r)] = clip_hi[0];
  slope[size_t(l)] = 1.0;
  icept[size_t(l)] = -y[0] + lam;
  slope[size_t(r)] = -1.0;
  icept[size_t(r)] = y[0] + lam;
  double afirst = 1.0, bfirst = -lam - y[1];
  double alast = -1.0, blast = -lam + y[1];

  for (int k = 1; k < m - 1; ++k) {
    // step in from the left until the derivative rises above -lam
    double alo = afirst, blo = bfirst;
    int lo = l;
    while (lo <= r && alo * knot[size_t(lo)] + blo <= -lam) {
      alo += slope[size_t(lo)];
      blo += icept[size_t(lo)];
      ++lo;
    }
    clip_lo[size_t(k)] = (-lam - blo) / alo;
    l = lo - 1;
    knot[size_t(l)] = clip_lo[size_t(k)];

    // step in from the right until the derivative falls below +lam
    double ahi = alast, bhi = blast;
    int hi = r;
    while (hi >= l && -ahi * knot[size_t(hi)] - bhi >= lam) {
      ahi += slope[size_t(hi)];
      bhi += icept[size_t(hi)];
      --hi;
    }
    clip_hi[size_t(k)] = (lam + bhi) / (-ahi);
    r = hi + 1;
    knot[size_t(r)] = clip_hi[size_t(k)];

    slope[size_t(l)] = alo;
    icept[size_t(l)] = blo + lam;
    slope[size_t(r)] = ahi;
    icept[size_t(r)] = bhi + lam;
    afirst = 1.0;
    bfirst = -lam - y[size_t(k + 1)];
    alast = -1.0;
    blast = -lam + y[size_t(k + 1)];
  }

  // last coordinate sits at the zero of the final total derivative
  double alo = afirst, blo = bfirst;
  int lo = l;
  while (lo <= r && alo * knot[size_t(lo)] + blo <= 0.0) {
    alo += slope[size_t(lo)];
    blo += icept[size_t(lo)];
    ++lo;
  }
  theta[size_t(m - 1)] = -blo / alo;

  // backward pass: clamp each coordinate into its recorded interval
  for (int k = m - 2; k >= 0; --k) {
    const double next = theta[size_t(k + 1)];
    if (next > clip_hi[size_t(k)]) {
      theta[size_t(k)] = clip_hi[size_t(k)];
    } else if (next < clip_lo[size_t(k)]) {
      theta[size_t(k)] = clip_lo[size_t(k)];
    } else {
      theta[size_t(k)] = next;
    }
  }
  return theta;
}

inline double sgn(double v) { return v > 0.0 ? 1.0 : -1.0; }

}  // namespace

std::vector<double> flsa_solve(const FusionProblem& problem) {
  validate(problem);
  std::vector<double> out;
  if (problem.input.size() == 1 || problem.lam2 == 0.0) {
    out = problem.input;
  } else {
    out = fuse_dp(problem.input, problem.lam2);
  }
  if (problem.lam1 > 0.0) {
    for (auto& v : out) v = soft_threshold(v, problem.lam1);
  }
  return out;
}

std::vector<double> flsa_solve(std::span<const double> x, double lam1,
                               double lam2) {
  return flsa_solve(
      FusionProblem{std::vector<double>(x.begin(), x.end()), lam1, lam2});
}

KktReport flsa_check_kkt(const FusionProblem& problem,
                         std::span<const double> candidate, double tol) {
  validate(problem);
  if (!(tol > 0.0)) throw std::invalid_argument("flsa: tol must be positive");
  const size_t m = problem.input.size();
  if (candidate.size() != m) {
    throw std::invalid_argument("flsa: candidate length mismatch");
  }

  // Stationarity at coordinate i reads
  //   theta_i - x_i + lam1*s_i + lam2*(u_i - u_{i-1}) = 0,
  // so lam2*u_i = (x_i - theta_i) - lam1*s_i + lam2*u_{i-1}. Carry the
  // feasible interval of lam2*u_i through the chain and intersect it with
  // the subdifferential constraint at each link; the candidate is optimal
  // iff the intersection never empties and the final interval admits 0
  // (folded in as the virtual constraint u_m = 0).
  KktReport report;
  report.violation.assign(m, 0.0);
  double lo = 0.0, hi = 0.0;
  bool feasible = true;
  for (size_t i = 0; i < m; ++i) {
    const double base = problem.input[i] - candidate[i];
    double rlo = base + lo;
    double rhi = base + hi;
    if (std::fabs(candidate[i]) <= tol) {
      rlo -= problem.lam1;
      rhi += problem.lam1;
    } else {
      const double shift = problem.lam1 * sgn(candidate[i]);
      rlo -= shift;
      rhi -= shift;
    }

    double alo, ahi;
    if (i + 1 == m) {
      alo = ahi = 0.0;
    } else if (std::fabs(candidate[i] - candidate[i + 1]) <= tol) {
      alo = -problem.lam2;
      ahi = problem.lam2;
    } else {
      alo = ahi = problem.lam2 * sgn(candidate[i] - candidate[i + 1]);
    }
    alo -= tol;
    ahi += tol;

    const double gap = std::max(0.0, std::max(rlo - ahi, alo - rhi));
    report.violation[i] = gap;
    if (gap > 0.0) feasible = false;

    lo = std::max(rlo, alo);
    hi = std::min(rhi, ahi);
    if (lo > hi) {
      // empty intersection: continue from the nearest admissible point so the
      // rest of the report stays informative
      const double pin = (rlo > ahi) ? ahi : alo;
      lo = hi = pin;
    }
    report.max_violation = std::max(report.max_violation, gap);
  }
  report.ok = feasible;
  return report;
}

double flsa_objective(const FusionProblem& problem,
                      std::span<const double> candidate) {
  validate(problem);
  if (candidate.size() != problem.input.size()) {
    throw std::invalid_argument("flsa: candidate length mismatch");
  }
  double f = 0.0;
  for (size_t i = 0; i < candidate.size(); ++i) {
    const double d = problem.input[i] - candidate[i];
    f += 0.5 * d * d + problem.lam1 * std::fabs(candidate[i]);
    if (i + 1 < candidate.size()) {
      f += problem.lam2 * std::fabs(candidate[i] - candidate[i + 1]);
    }
  }
  return f;
}

}  // namespace mfl

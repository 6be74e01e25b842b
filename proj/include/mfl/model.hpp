#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace mfl {

// Longitudinal design: n individuals, p predictors, T timepoints, K classes.
// y stores class labels in 1..K with 0 as the missing marker; an individual
// belongs to the observed set of timepoint t exactly when its outcome there
// is non-missing. Predictor values are only required finite at observed
// cells.
struct PanelData {
  int n = 0, p = 0, T = 0, K = 0;
  std::vector<int> y;       // n*T, (i,t) -> i*T + t
  std::vector<double> x;    // n*T*p, (i,t,j) -> (i*T + t)*p + j
  std::vector<std::vector<int>> observed;  // per timepoint, sorted
  std::vector<std::string> ids;
  std::vector<std::string> class_labels;
  std::vector<std::string> predictor_names;

  int y_at(int i, int t) const { return y[size_t(i) * size_t(T) + size_t(t)]; }
  int& y_at(int i, int t) { return y[size_t(i) * size_t(T) + size_t(t)]; }
  std::span<const double> x_at(int i, int t) const {
    return {x.data() + (size_t(i) * size_t(T) + size_t(t)) * size_t(p),
            size_t(p)};
  }
  std::span<double> x_at(int i, int t) {
    return {x.data() + (size_t(i) * size_t(T) + size_t(t)) * size_t(p),
            size_t(p)};
  }
  int n_at(int t) const { return int(observed[size_t(t)].size()); }
  std::size_t total_observed() const;

  // Derives the per-timepoint observed sets from y and validates invariants.
  void finalize();
  void default_names();
};

// Intercepts beta0 (T x (K-1)) and slope tensor beta (p x T x (K-1)); class
// K is the reference. The same shape carries gradients and generalized
// gradients, whose blocks line up one-to-one with these.
struct Coefficients {
  int p = 0, T = 0, K = 2;
  std::vector<double> beta0;  // (t,k) -> t*(K-1) + k
  std::vector<double> beta;   // (j,t,k) -> (k*T + t)*p + j

  static Coefficients zeros(int p, int T, int K);

  double b0(int t, int k) const {
    return beta0[size_t(t) * size_t(K - 1) + size_t(k)];
  }
  double& b0(int t, int k) {
    return beta0[size_t(t) * size_t(K - 1) + size_t(k)];
  }
  double b(int j, int t, int k) const { return beta[slope_index(j, t, k)]; }
  double& b(int j, int t, int k) { return beta[slope_index(j, t, k)]; }
  std::size_t slope_index(int j, int t, int k) const {
    return (size_t(k) * size_t(T) + size_t(t)) * size_t(p) + size_t(j);
  }
  bool same_shape(const Coefficients& o) const {
    return p == o.p && T == o.T && K == o.K;
  }
};

struct PenaltyParams {
  double lam1 = 0.0;
  double lam2 = 0.0;
};

// Class probabilities at timepoint t (0-based) for one predictor vector,
// evaluated with log-sum-exp stabilization. Entry k-1 is class k; the last
// entry is the reference class.
std::vector<double> class_probabilities(const Coefficients& coeffs,
                                        std::span<const double> x, int t);

// Negative log likelihood with each timepoint's sum scaled by 1/n_t;
// timepoints with no observed individuals contribute nothing.
double scaled_nll(const Coefficients& coeffs, const PanelData& data);

// Plain per-cell sum, used by the information criteria.
double unscaled_nll(const Coefficients& coeffs, const PanelData& data);

// Exact gradient of scaled_nll in one O(npTK) pass. beta0 holds the
// intercept partials, beta the slope partials.
Coefficients gradient(const Coefficients& coeffs, const PanelData& data);

// lam1 * sum |beta| + lam2 * sum of successive-difference magnitudes along
// each trajectory; intercepts are not penalized.
double penalty_value(const Coefficients& coeffs, const PenaltyParams& params);

double objective(const Coefficients& coeffs, const PanelData& data,
                 const PenaltyParams& params);

// Most probable class in 1..K; ties break toward the smallest index.
int predict(const Coefficients& coeffs, std::span<const double> x, int t);

long misclassification_count(const Coefficients& coeffs,
                             const PanelData& data);
double misclassification_rate(const Coefficients& coeffs,
                              const PanelData& data);

}  // namespace mfl

#include "mfl/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mfl/parallel.hpp"

namespace mfl {

std::size_t PanelData::total_observed() const {
  std::size_t total = 0;
  for (const auto& idx : observed) total += idx.size();
  return total;
}

void PanelData::finalize() {
  if (n < 0 || p < 0 || T < 1 || K < 2) {
    throw std::invalid_argument("panel: need T >= 1 and K >= 2");
  }
  if (y.size() != size_t(n) * size_t(T) ||
      x.size() != size_t(n) * size_t(T) * size_t(p)) {
    throw std::invalid_argument("panel: array sizes do not match dimensions");
  }
  observed.assign(size_t(T), {});
  for (int t = 0; t < T; ++t) {
    for (int i = 0; i < n; ++i) {
      const int label = y_at(i, t);
      if (label < 0 || label > K) {
        throw std::invalid_argument("panel: outcome label outside 0..K");
      }
      if (label == 0) continue;
      for (double v : x_at(i, t)) {
        if (!std::isfinite(v)) {
          throw std::invalid_argument(
              "panel: non-finite predictor at an observed cell");
        }
      }
      observed[size_t(t)].push_back(i);
    }
  }
  default_names();
}

void PanelData::default_names() {
  if (ids.size() != size_t(n)) {
    ids.resize(size_t(n));
    for (int i = 0; i < n; ++i) ids[size_t(i)] = std::to_string(i + 1);
  }
  if (class_labels.size() != size_t(K)) {
    class_labels.resize(size_t(K));
    for (int k = 0; k < K; ++k) class_labels[size_t(k)] = std::to_string(k + 1);
  }
  if (predictor_names.size() != size_t(p)) {
    predictor_names.resize(size_t(p));
    for (int j = 0; j < p; ++j) {
      predictor_names[size_t(j)] = "x" + std::to_string(j + 1);
    }
  }
}

Coefficients Coefficients::zeros(int p, int T, int K) {
  Coefficients c;
  c.p = p;
  c.T = T;
  c.K = K;
  c.beta0.assign(size_t(T) * size_t(K - 1), 0.0);
  c.beta.assign(size_t(p) * size_t(T) * size_t(K - 1), 0.0);
  return c;
}

namespace {

// Logits for classes 1..K-1 at one cell; the reference logit is 0.
inline void fill_logits(const Coefficients& c, const double* x, int t,
                        double* eta) {
  const int K1 = c.K - 1;
  const int p = c.p;
  for (int k = 0; k < K1; ++k) {
    double acc = c.b0(t, k);
    const double* w =
        c.beta.data() + (size_t(k) * size_t(c.T) + size_t(t)) * size_t(p);
    for (int j = 0; j < p; ++j) acc += w[j] * x[j];
    eta[k] = acc;
  }
}

// log(1 + sum_k exp(eta_k)) with max subtraction.
inline double log_sum_exp1(const double* eta, int K1) {
  double mx = 0.0;
  for (int k = 0; k < K1; ++k) mx = std::max(mx, eta[k]);
  double s = std::exp(-mx);
  for (int k = 0; k < K1; ++k) s += std::exp(eta[k] - mx);
  return mx + std::log(s);
}

double nll_impl(const Coefficients& c, const PanelData& d, bool scaled) {
  if (c.p != d.p || c.T != d.T || c.K != d.K) {
    throw std::invalid_argument("nll: coefficient/panel shape mismatch");
  }
  const int K1 = d.K - 1;
  std::vector<double> eta(size_t(std::max(K1, 1)));
  double total = 0.0;
  for (int t = 0; t < d.T; ++t) {
    const auto& idx = d.observed[size_t(t)];
    if (idx.empty()) continue;
    double acc = 0.0;
    for (int i : idx) {
      fill_logits(c, d.x_at(i, t).data(), t, eta.data());
      const int label = d.y_at(i, t);
      acc += log_sum_exp1(eta.data(), K1);
      if (label <= K1) acc -= eta[size_t(label - 1)];
    }
    total += scaled ? acc / double(idx.size()) : acc;
  }
  return total;
}

}  // namespace

std::vector<double> class_probabilities(const Coefficients& coeffs,
                                        std::span<const double> x, int t) {
  if (t < 0 || t >= coeffs.T) {
    throw std::invalid_argument("class_probabilities: timepoint out of range");
  }
  if (int(x.size()) != coeffs.p) {
    throw std::invalid_argument("class_probabilities: wrong predictor count");
  }
  for (double v : x) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("class_probabilities: non-finite input");
    }
  }
  const int K1 = coeffs.K - 1;
  std::vector<double> out(size_t(coeffs.K));
  std::vector<double> eta(static_cast<size_t>(K1));
  fill_logits(coeffs, x.data(), t, eta.data());
  double mx = 0.0;
  for (int k = 0; k < K1; ++k) mx = std::max(mx, eta[size_t(k)]);
  double denom = std::exp(-mx);
  for (int k = 0; k < K1; ++k) {
    out[size_t(k)] = std::exp(eta[size_t(k)] - mx);
    denom += out[size_t(k)];
  }
  for (int k = 0; k < K1; ++k) out[size_t(k)] /= denom;
  out[size_t(K1)] = std::exp(-mx) / denom;
  return out;
}

double scaled_nll(const Coefficients& coeffs, const PanelData& data) {
  return nll_impl(coeffs, data, true);
}

double unscaled_nll(const Coefficients& coeffs, const PanelData& data) {
  return nll_impl(coeffs, data, false);
}

Coefficients gradient(const Coefficients& coeffs, const PanelData& data) {
  if (coeffs.p != data.p || coeffs.T != data.T || coeffs.K != data.K) {
    throw std::invalid_argument("gradient: coefficient/panel shape mismatch");
  }
  const int K1 = data.K - 1;
  const int p = data.p;
  Coefficients g = Coefficients::zeros(data.p, data.T, data.K);
  // Timepoints touch disjoint slices of g, so this parallelizes with no
  // reduction and the result is identical for any thread count.
  parallel_for(data.T, [&](int t) {
    const auto& idx = data.observed[size_t(t)];
    if (idx.empty()) return;
    const double inv = 1.0 / double(idx.size());
    std::vector<double> eta(static_cast<size_t>(K1)), prob(static_cast<size_t>(K1));
    for (int i : idx) {
      const double* xi = data.x_at(i, t).data();
      fill_logits(coeffs, xi, t, eta.data());
      double mx = 0.0;
      for (int k = 0; k < K1; ++k) mx = std::max(mx, eta[size_t(k)]);
      double denom = std::exp(-mx);
      for (int k = 0; k < K1; ++k) {
        prob[size_t(k)] = std::exp(eta[size_t(k)] - mx);
        denom += prob[size_t(k)];
      }
      const int label = data.y_at(i, t);
      for (int k = 0; k < K1; ++k) {
        const double r =
            (prob[size_t(k)] / denom - (label == k + 1 ? 1.0 : 0.0)) * inv;
        g.b0(t, k) += r;
        double* gs = g.beta.data() +
                     (size_t(k) * size_t(data.T) + size_t(t)) * size_t(p);
        for (int j = 0; j < p; ++j) gs[j] += r * xi[j];
      }
    }
  });
  return g;
}

double penalty_value(const Coefficients& coeffs, const PenaltyParams& params) {
  double abs_sum = 0.0, diff_sum = 0.0;
  const int K1 = coeffs.K - 1;
  for (int k = 0; k < K1; ++k) {
    for (int j = 0; j < coeffs.p; ++j) {
      double prev = 0.0;
      for (int t = 0; t < coeffs.T; ++t) {
        const double v = coeffs.b(j, t, k);
        abs_sum += std::fabs(v);
        if (t > 0) diff_sum += std::fabs(prev - v);
        prev = v;
      }
    }
  }
  return params.lam1 * abs_sum + params.lam2 * diff_sum;
}

double objective(const Coefficients& coeffs, const PanelData& data,
                 const PenaltyParams& params) {
  return scaled_nll(coeffs, data) + penalty_value(coeffs, params);
}

int predict(const Coefficients& coeffs, std::span<const double> x, int t) {
  const auto probs = class_probabilities(coeffs, x, t);
  int best = 0;
  for (int k = 1; k < int(probs.size()); ++k) {
    if (probs[size_t(k)] > probs[size_t(best)]) best = k;
  }
  return best + 1;
}

long misclassification_count(const Coefficients& coeffs,
                             const PanelData& data) {
  long wrong = 0;
  for (int t = 0; t < data.T; ++t) {
    for (int i : data.observed[size_t(t)]) {
      if (predict(coeffs, data.x_at(i, t), t) != data.y_at(i, t)) ++wrong;
    }
  }
  return wrong;
}

double misclassification_rate(const Coefficients& coeffs,
                              const PanelData& data) {
  const std::size_t total = data.total_observed();
  if (total == 0) return 0.0;
  return double(misclassification_count(coeffs, data)) / double(total);
}

}  // namespace mfl

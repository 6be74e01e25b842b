#pragma once

#include <vector>

#include "mfl/model.hpp"
#include "mfl/rng.hpp"

namespace testutil {

inline mfl::PanelData random_panel(mfl::Rng& rng, int n, int p, int T, int K,
                                   double missing_prob = 0.0) {
  mfl::PanelData d;
  d.n = n;
  d.p = p;
  d.T = T;
  d.K = K;
  d.y.assign(size_t(n) * size_t(T), 0);
  d.x.assign(size_t(n) * size_t(T) * size_t(p), 0.0);
  for (int i = 0; i < n; ++i) {
    for (int t = 0; t < T; ++t) {
      const bool missing = rng.uniform() < missing_prob;
      d.y_at(i, t) = missing ? 0 : 1 + rng.below(K);
      auto row = d.x_at(i, t);
      for (auto& v : row) v = rng.normal();
    }
  }
  d.finalize();
  return d;
}

inline mfl::Coefficients random_coeffs(mfl::Rng& rng, int p, int T, int K,
                                       double scale = 0.5) {
  auto c = mfl::Coefficients::zeros(p, T, K);
  for (auto& v : c.beta0) v = scale * rng.normal();
  for (auto& v : c.beta) v = scale * rng.normal();
  return c;
}

inline mfl::Coefficients lincomb(double a, const mfl::Coefficients& A,
                                 double b, const mfl::Coefficients& B) {
  auto out = A;
  for (size_t i = 0; i < out.beta0.size(); ++i) {
    out.beta0[i] = a * A.beta0[i] + b * B.beta0[i];
  }
  for (size_t i = 0; i < out.beta.size(); ++i) {
    out.beta[i] = a * A.beta[i] + b * B.beta[i];
  }
  return out;
}

}  // namespace testutil

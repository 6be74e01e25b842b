#include "mfl/simulate.hpp"

#include <algorithm>
#include <stdexcept>

#include "mfl/errors.hpp"
#include "mfl/rng.hpp"

namespace mfl {

std::vector<TrueTrajectory> default_trajectories(int p, int T) {
  if (p < 3 || T < 1) {
    throw std::invalid_argument(
        "simulate: default trajectories need p >= 3 and T >= 1");
  }
  auto stepped = [T](int predictor, double before, double after, int numer) {
    TrueTrajectory traj{predictor, 1, {}};
    const int split = std::max(1, numer * T / 3);
    traj.segments.push_back({1, split, before});
    if (split < T) traj.segments.push_back({split + 1, T, after});
    return traj;
  };
  return {
      stepped(p - 2, 2.0, 1.5, 1),
      stepped(p - 1, -1.5, -3.0, 2),
      {p, 1, {{1, T, 2.0}}},
  };
}

namespace {

void validate(const SimConfig& cfg,
              const std::vector<TrueTrajectory>& trajectories) {
  if (cfg.n < 1 || cfg.p < 1 || cfg.T < 1 || cfg.K < 2) {
    throw std::invalid_argument("simulate: invalid dimensions");
  }
  if (!cfg.intercepts.empty() && int(cfg.intercepts.size()) != cfg.K - 1) {
    throw std::invalid_argument("simulate: intercepts must have K-1 entries");
  }
  std::vector<std::pair<int, int>> seen;
  for (const auto& traj : trajectories) {
    if (traj.predictor < 1 || traj.predictor > cfg.p) {
      throw std::invalid_argument("simulate: trajectory predictor out of range");
    }
    if (traj.class_k < 1 || traj.class_k > cfg.K - 1) {
      throw std::invalid_argument("simulate: trajectory class out of range");
    }
    const std::pair<int, int> key{traj.predictor, traj.class_k};
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) {
      throw std::invalid_argument("simulate: duplicate trajectory");
    }
    seen.push_back(key);
    // segments must partition 1..T
    auto segs = traj.segments;
    std::sort(segs.begin(), segs.end(),
              [](const Segment& a, const Segment& b) { return a.t_begin < b.t_begin; });
    int expect = 1;
    for (const auto& s : segs) {
      if (s.t_begin != expect || s.t_end < s.t_begin) {
        throw std::invalid_argument("simulate: segments must partition 1..T");
      }
      expect = s.t_end + 1;
    }
    if (expect != cfg.T + 1) {
      throw std::invalid_argument("simulate: segments must partition 1..T");
    }
  }
}

}  // namespace

Coefficients true_coefficients(const SimConfig& config) {
  const auto trajectories =
      (config.trajectories.empty() && config.use_default_trajectories)
          ? default_trajectories(config.p, config.T)
          : config.trajectories;
  validate(config, trajectories);
  auto truth = Coefficients::zeros(config.p, config.T, config.K);
  for (int k = 0; k < config.K - 1; ++k) {
    const double b0 =
        config.intercepts.empty() ? 0.0 : config.intercepts[size_t(k)];
    for (int t = 0; t < config.T; ++t) truth.b0(t, k) = b0;
  }
  for (const auto& traj : trajectories) {
    for (const auto& seg : traj.segments) {
      for (int t = seg.t_begin - 1; t < seg.t_end; ++t) {
        truth.b(traj.predictor - 1, t, traj.class_k - 1) = seg.value;
      }
    }
  }
  return truth;
}

Simulated generate(const SimConfig& config) {
  const Coefficients truth = true_coefficients(config);
  Rng rng(config.seed);

  PanelData d;
  d.n = config.n;
  d.p = config.p;
  d.T = config.T;
  d.K = config.K;
  d.y.assign(size_t(d.n) * size_t(d.T), 0);
  d.x.assign(size_t(d.n) * size_t(d.T) * size_t(d.p), 0.0);
  for (auto& v : d.x) v = rng.normal();
  for (int i = 0; i < d.n; ++i) {
    for (int t = 0; t < d.T; ++t) {
      const auto probs = class_probabilities(truth, d.x_at(i, t), t);
      const double u = rng.uniform();
      double cum = 0.0;
      int label = d.K;
      for (int k = 0; k < d.K; ++k) {
        cum += probs[size_t(k)];
        if (u < cum) {
          label = k + 1;
          break;
        }
      }
      d.y_at(i, t) = label;
    }
  }
  d.finalize();
  return {std::move(d), truth};
}

double evaluate(const PanelData& train, const PanelData& test,
                const Coefficients& coeffs) {
  if (train.p != test.p || train.T != test.T || train.K != test.K) {
    throw EvaluationError("evaluate: train/test dimension mismatch");
  }
  if (coeffs.p != test.p || coeffs.T != test.T || coeffs.K != test.K) {
    throw EvaluationError("evaluate: coefficient/test dimension mismatch");
  }
  if (test.total_observed() == 0) {
    throw EvaluationError("evaluate: test set has no observed cells");
  }
  return misclassification_rate(coeffs, test);
}

}  // namespace mfl

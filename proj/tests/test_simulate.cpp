#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mfl/errors.hpp"
#include "mfl/model.hpp"
#include "mfl/simulate.hpp"
#include "mfl/solver.hpp"

using namespace mfl;

TEST_CASE("default configuration produces the documented shape") {
  const auto sim = generate(SimConfig{});
  CHECK(sim.data.n == 50);
  CHECK(sim.data.p == 30);
  CHECK(sim.data.T == 15);
  CHECK(sim.data.K == 2);
  CHECK(sim.data.total_observed() == 50u * 15u);
  // three active trajectories
  int active = 0;
  for (int j = 0; j < 30; ++j) {
    double mx = 0.0;
    for (int t = 0; t < 15; ++t) mx = std::max(mx, std::fabs(sim.truth.b(j, t, 0)));
    if (mx > 0.0) ++active;
  }
  CHECK(active == 3);
}

TEST_CASE("zero true coefficients give near-uniform class frequencies") {
  SimConfig cfg;
  cfg.n = 400;
  cfg.T = 6;
  cfg.K = 2;
  cfg.p = 3;
  cfg.seed = 77;
  cfg.use_default_trajectories = false;
  const auto sim = generate(cfg);
  const double se = std::sqrt(0.5 * 0.5 / cfg.n);
  for (int t = 0; t < cfg.T; ++t) {
    int ones = 0;
    for (int i = 0; i < cfg.n; ++i) {
      if (sim.data.y_at(i, t) == 1) ++ones;
    }
    CHECK(std::fabs(double(ones) / cfg.n - 0.5) <= 3.0 * se);
  }
}

TEST_CASE("generation is reproducible for a fixed seed") {
  SimConfig cfg;
  cfg.seed = 123456;
  const auto a = generate(cfg);
  const auto b = generate(cfg);
  CHECK(a.data.x == b.data.x);
  CHECK(a.data.y == b.data.y);
  CHECK(a.truth.beta == b.truth.beta);
}

TEST_CASE("config validation") {
  SimConfig cfg;
  cfg.trajectories = {{31, 1, {{1, 15, 1.0}}}};
  CHECK_THROWS(generate(cfg));
  cfg.trajectories = {{5, 1, {{1, 10, 1.0}}}};  // gap at 11..15
  CHECK_THROWS(generate(cfg));
  cfg.trajectories = {{5, 1, {{1, 15, 1.0}}}, {5, 1, {{1, 15, 2.0}}}};
  CHECK_THROWS(generate(cfg));
}

TEST_CASE("evaluating the truth approaches the Bayes error") {
  SimConfig train_cfg;
  train_cfg.seed = 5;
  const auto train = generate(train_cfg);

  SimConfig test_cfg;
  test_cfg.n = 7000;  // 7000 * 15 cells for the Monte-Carlo oracle
  test_cfg.seed = 6;
  const auto test = generate(test_cfg);

  const double rate = evaluate(train.data, test.data, test.truth);

  // direct estimate of E[1 - max_k p_k] over the same predictor draws
  double bayes = 0.0;
  for (int i = 0; i < test.data.n; ++i) {
    for (int t = 0; t < test.data.T; ++t) {
      const auto probs = class_probabilities(test.truth, test.data.x_at(i, t), t);
      bayes += 1.0 - std::max(probs[0], probs[1]);
    }
  }
  bayes /= double(test.data.n * test.data.T);
  CHECK(std::fabs(rate - bayes) <= 0.01);
  CHECK(rate > 0.0);
  CHECK(rate < 0.5);
}

TEST_CASE("a majority-class predictor scores the minority fraction") {
  SimConfig cfg;
  cfg.seed = 9;
  const auto sim = generate(cfg);
  auto blunt = Coefficients::zeros(cfg.p, cfg.T, cfg.K);
  for (int t = 0; t < cfg.T; ++t) blunt.b0(t, 0) = 1e3;  // always class 1
  double minority = 0.0;
  for (int i = 0; i < cfg.n; ++i) {
    for (int t = 0; t < cfg.T; ++t) {
      if (sim.data.y_at(i, t) != 1) minority += 1.0;
    }
  }
  minority /= double(cfg.n * cfg.T);
  CHECK(evaluate(sim.data, sim.data, blunt) == doctest::Approx(minority).epsilon(1e-12));
}

TEST_CASE("perfect agreement scores zero") {
  SimConfig cfg;
  cfg.n = 4;
  cfg.T = 2;
  cfg.p = 1;
  cfg.seed = 10;
  cfg.use_default_trajectories = false;
  auto sim = generate(cfg);
  // rig the outcomes to match the blunt always-class-1 rule
  for (auto& v : sim.data.y) v = 1;
  sim.data.finalize();
  auto blunt = Coefficients::zeros(cfg.p, cfg.T, cfg.K);
  for (int t = 0; t < cfg.T; ++t) blunt.b0(t, 0) = 5.0;
  CHECK(evaluate(sim.data, sim.data, blunt) == 0.0);
}

TEST_CASE("dimension mismatches are reported") {
  SimConfig a;
  a.seed = 11;
  SimConfig b = a;
  b.p = 31;
  const auto sa = generate(a);
  const auto sb = generate(b);
  CHECK_THROWS_AS(evaluate(sa.data, sb.data, sa.truth), EvaluationError);
  CHECK_THROWS_AS(evaluate(sb.data, sa.data, sa.truth), EvaluationError);
}

TEST_CASE("regularization beats the unregularized fit out of sample") {
  // scaled-down version of the benchmark: the loss here is the 1/n_t-scaled
  // negative log likelihood, so the headline tuning pair (2.5, 12.5) quoted
  // against the raw sum-loss becomes (2.5/n, 12.5/n)
  const PenaltyParams reg{2.5 / 50.0, 12.5 / 50.0};
  double reg_total = 0.0, unreg_total = 0.0;
  for (int rep = 0; rep < 3; ++rep) {
    SimConfig cfg;
    cfg.seed = 1000 + std::uint64_t(rep);
    const auto train = generate(cfg);
    SimConfig test_cfg = cfg;
    test_cfg.seed = 2000 + std::uint64_t(rep);
    const auto test = generate(test_cfg);

    const auto fit_reg = fit(train.data, reg);
    const auto fit_unreg = fit(train.data, {0.0, 0.0});
    const double e_reg = evaluate(train.data, test.data, fit_reg.coefficients);
    const double e_unreg = evaluate(train.data, test.data, fit_unreg.coefficients);
    reg_total += e_reg;
    unreg_total += e_unreg;
    MESSAGE("rep " << rep << ": regularized " << e_reg << " unregularized " << e_unreg);
  }
  CHECK(reg_total < unreg_total);
}

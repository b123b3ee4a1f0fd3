#include <cmath>

#include "doctest.h"
#include "hybridctl/decision.hpp"
#include "hybridctl/error.hpp"
#include "hybridctl/numerics.hpp"
#include "oracles.hpp"

using namespace hybridctl;

TEST_CASE("ttp_pool_decision") {
  CHECK(ttp_pool_decision(1.0, 0.05));
  CHECK(ttp_pool_decision(-1.0, 0.05));
  CHECK_FALSE(ttp_pool_decision(2.5, 0.05));
  const double z = numerics::std_normal_quantile(0.975);
  CHECK(ttp_pool_decision(1.9599, 0.05));
  CHECK(ttp_pool_decision(-1.9599, 0.05));
  CHECK_FALSE(ttp_pool_decision(z, 0.05));  // tie resolves to no pool
  CHECK_FALSE(ttp_pool_decision(-1.9600, 0.05));
}

TEST_CASE("eq_pool_decision") {
  const double sd = std::sqrt(5.0);
  const EqConfig cfg{1.5, 0.05};
  const double b50 = eq_pool_bound({50, 0, sd}, {50, 0, sd}, cfg);
  const double b100 = eq_pool_bound({100, 0, sd}, {100, 0, sd}, cfg);
  CHECK(std::abs(b50 - 1.71) < 0.01);
  CHECK(std::abs(b100 - 3.10) < 0.01);
  CHECK(eq_pool_decision(1.70, {50, 0, sd}, {50, 0, sd}, cfg));
  CHECK_FALSE(eq_pool_decision(-1.72, {50, 0, sd}, {50, 0, sd}, cfg));
  CHECK(eq_pool_decision(3.09, {100, 0, sd}, {100, 0, sd}, cfg));

  const EqConfig tiny{0.1, 0.05};
  CHECK(eq_pool_bound({50, 0, sd}, {50, 0, sd}, tiny) < 0.0);
  for (double t = -3; t <= 3; t += 0.1) {
    CHECK_FALSE(eq_pool_decision(t, {50, 0, sd}, {50, 0, sd}, tiny));
  }
  CHECK_FALSE(eq_pool_decision(0.0, {50, 0, sd}, {50, 0, sd}, tiny));
}

TEST_CASE("adjusted alpha: trivial regimes") {
  const auto design = DesignParams::with_variance(50, 50, 50, 5.0);
  SUBCASE("pooling interval shrinks to a point") {
    const auto adj = adjusted_alpha_ttp(design, 0.05, 1.0 - 1e-9);
    CHECK(std::abs(adj.alpha_star - 0.05) < 1e-6);
  }
  SUBCASE("empty equivalence rectangle") {
    const auto adj = adjusted_alpha_eq(design, 0.05, {0.0001, 0.05});
    CHECK(adj.alpha_star == 0.05);
  }
  SUBCASE("always pooling with zero shift") {
    const auto adj = adjusted_alpha_eq(design, 0.05, {1e6, 0.05});
    CHECK(std::abs(adj.alpha_star - 0.05) < 1e-9);
  }
}

TEST_CASE("adjusted alpha: solver properties") {
  const auto design = DesignParams::with_variance(50, 50, 50, 5.0);
  const auto a = adjusted_alpha_ttp(design, 0.05, 0.05);
  const auto b = adjusted_alpha_ttp(design, 0.05, 0.05);
  CHECK(a.alpha_star == b.alpha_star);
  CHECK(std::abs(a.residual) <= 1e-8);
  CHECK(a.alpha_star > 0.0);
  CHECK(a.alpha_star < 0.05);  // pooling with equal variances is liberal at alpha

  const auto e = adjusted_alpha_eq(design, 0.05, {1.5, 0.05});
  CHECK(std::abs(e.residual) <= 1e-8);
  CHECK(std::abs(0.05 - overall_rejection(design, e.alpha_star,
                                          1.5 - numerics::std_normal_quantile(0.95) *
                                                    std::sqrt(0.2))) < 1e-8);

  SUBCASE("symmetric in the control shift when sigma_c = sigma_h") {
    for (double shift : {0.3, 0.8, 1.5}) {
      auto plus = design;
      auto minus = design;
      plus.mu_diff = shift;
      minus.mu_diff = -shift;
      CHECK(adjusted_alpha_ttp(plus, 0.05, 0.05).alpha_star ==
            doctest::Approx(adjusted_alpha_ttp(minus, 0.05, 0.05).alpha_star).epsilon(1e-10));
      CHECK(adjusted_alpha_eq(plus, 0.05, {1.5, 0.1}).alpha_star ==
            doctest::Approx(adjusted_alpha_eq(minus, 0.05, {1.5, 0.1}).alpha_star)
                .epsilon(1e-10));
    }
  }
  SUBCASE("overall rejection increases with alpha*") {
    double prev = 0.0;
    for (double x = 0.005; x < 0.5; x += 0.005) {
      const double r = overall_rejection(design, x, 0.8);
      CHECK(r > prev);
      prev = r;
    }
  }
  SUBCASE("invalid designs") {
    auto bad = design;
    bad.n_c = 1;
    CHECK_THROWS_AS(adjusted_alpha_ttp(bad, 0.05, 0.05), Error);
    CHECK_THROWS_AS(adjusted_alpha_ttp(design, 1.5, 0.05), Error);
  }
}

TEST_CASE("adjusted alpha reproduces nominal level in simulation") {
  // Known-variance simulation of the whole pool / no-pool procedure.
  struct Case {
    DesignParams design;
    oracle::PoolRule rule;
  };
  const Case cases[] = {
      {DesignParams::with_variance(50, 50, 50, 5.0), {false, 0.05, 0}},
      {DesignParams::with_variance(50, 25, 25, 5.0), {false, 0.10, 0}},
      {DesignParams::with_variance(100, 50, 50, 5.0), {true, 0.05, 1.5}},
      {{40, 30, 80, 2.0, 1.5, 3.0, 0.0}, {false, 0.05, 0}},
      {{40, 30, 80, 2.0, 1.5, 3.0, 0.4}, {false, 0.05, 0}},
      {{60, 60, 60, 2.2, 2.2, 2.2, -0.5}, {true, 0.10, 1.5}},
  };
  std::uint64_t seed = 100;
  for (const auto& c : cases) {
    const double alpha_star =
        c.rule.equivalence
            ? adjusted_alpha_eq(c.design, 0.05, {c.rule.delta, c.rule.alpha_h}).alpha_star
            : adjusted_alpha_ttp(c.design, 0.05, c.rule.alpha_h).alpha_star;
    const auto mc = oracle::ttp_procedure_mc(c.design, alpha_star, c.rule, 300000, seed++);
    CHECK(std::abs(mc.p - 0.05) <= 4 * std::sqrt(0.05 * 0.95 / 300000));
  }
}

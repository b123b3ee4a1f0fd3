#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "hybridctl/error.hpp"
#include "hybridctl/numerics.hpp"
#include "oracles.hpp"

using namespace hybridctl;
using namespace hybridctl::numerics;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected hybridctl::Error");
  return ErrorCode::kUsage;
}

}  // namespace

TEST_CASE("std_normal_cdf") {
  CHECK(std_normal_cdf(0.0) == 0.5);
  CHECK(std::abs(std_normal_cdf(1.959964) - 0.975) < 1e-6);
  CHECK(std::abs(std_normal_cdf(-1.312) - 0.0947) < 5e-4);

  SUBCASE("matches quadrature of the density") {
    for (double x : {-6.0, -3.3, -1.0, -0.2, 0.4, 1.959964, 2.7, 5.0}) {
      CHECK(std::abs(std_normal_cdf(x) - oracle::normal_cdf(x)) < 1e-10);
    }
  }
  SUBCASE("symmetry and monotonicity") {
    double prev = 0.0;
    for (double x = -8.0; x <= 8.0; x += 0.01) {
      CHECK(std::abs(std_normal_cdf(x) + std_normal_cdf(-x) - 1.0) < 1e-15);
      CHECK(std_normal_cdf(x) >= prev);
      prev = std_normal_cdf(x);
    }
  }
}

TEST_CASE("std_normal_quantile") {
  CHECK(std_normal_quantile(0.5) == 0.0);
  // Frozen from bisection on the quadrature cdf.
  const double z975 =
      oracle::bisect([](double x) { return oracle::normal_cdf(x) - 0.975; }, 0.0, 5.0, 80);
  const double z95 =
      oracle::bisect([](double x) { return oracle::normal_cdf(x) - 0.95; }, 0.0, 5.0, 80);
  CHECK(std::abs(z975 - 1.959964) < 1e-6);
  CHECK(std::abs(z95 - 1.644854) < 1e-6);
  CHECK(std::abs(std_normal_quantile(0.975) - z975) < 1e-9);
  CHECK(std::abs(std_normal_quantile(0.95) - z95) < 1e-9);

  SUBCASE("inverse of the cdf") {
    for (double p = 0.001; p < 0.999; p += 0.00137) {
      const double x = std_normal_quantile(p);
      CHECK(std::abs(std_normal_cdf(x) - p) < 1e-10);
      CHECK(std::abs(std_normal_quantile(1.0 - p) + x) < 1e-9);
    }
    CHECK(std::abs(std_normal_cdf(std_normal_quantile(1e-12)) - 1e-12) < 1e-22);
  }
  SUBCASE("domain") {
    CHECK(code_of([] { std_normal_quantile(0.0); }) == ErrorCode::kDomain);
    CHECK(code_of([] { std_normal_quantile(1.0); }) == ErrorCode::kDomain);
    CHECK(code_of([] { std_normal_quantile(-0.3); }) == ErrorCode::kDomain);
  }
}

TEST_CASE("t_pdf") {
  CHECK(t_pdf(-2.0, 98) == t_pdf(2.0, 98));
  CHECK(std::abs(t_pdf(0.0, 1) - 1.0 / std::numbers::pi) < 1e-9);
  CHECK(std::abs(t_pdf(1.6606, 98) / t_pdf(0.0, 98) - 0.25) < 0.005);
  CHECK(code_of([] { t_pdf(0.0, 0); }) == ErrorCode::kDomain);

  SUBCASE("agrees with a from-scratch density") {
    for (int df : {1, 2, 5, 30, 98}) {
      for (double x : {-3.0, -0.5, 0.0, 1.2, 7.0}) {
        CHECK(t_pdf(x, df) == doctest::Approx(oracle::t_density(x, df)).epsilon(1e-12));
      }
    }
  }
  SUBCASE("integrates to one") {
    for (int df : {1, 2, 3, 4, 5, 10, 30, 98, 1000}) {
      const double mass =
          oracle::simpson([df](double x) { return t_pdf(x, df); }, -50.0, 50.0, 200000);
      // Heavy tails leave visible mass outside [-50, 50] for small df.
      CHECK(std::abs(mass - (t_cdf(50.0, df) - t_cdf(-50.0, df))) < 1e-8);
      if (df >= 5) CHECK(std::abs(mass - 1.0) < 1e-6);
    }
  }
  SUBCASE("density ratio equals pdf ratio") {
    for (int df : {1, 7, 98, 287}) {
      for (double x : {0.0, 0.65, 1.96, 4.0}) {
        CHECK(t_pdf_ratio(x, df) == doctest::Approx(t_pdf(x, df) / t_pdf(0, df)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("t_cdf and t_quantile") {
  SUBCASE("cdf against quadrature") {
    for (int df : {1, 3, 10, 98}) {
      for (double x : {-4.0, -1.0, 0.3, 1.66, 2.5}) {
        CHECK(std::abs(t_cdf(x, df) - oracle::t_cdf(x, df)) < 1e-9);
      }
    }
  }
  CHECK(t_quantile(0.5, 7) == 0.0);
  CHECK(t_quantile(0.5, 98) == 0.0);

  // Frozen from bisection on the quadrature cdf: 1.660551.
  const double q95 =
      oracle::bisect([](double x) { return oracle::t_cdf(x, 98) - 0.95; }, 0.0, 4.0, 60);
  CHECK(std::abs(q95 - 1.6606) < 1e-3);
  CHECK(std::abs(t_quantile(0.95, 98) - q95) < 1e-8);
  CHECK(std::abs(t_quantile(0.975, 1000000) - std_normal_quantile(0.975)) < 1e-3);
  CHECK(t_quantile(0.975, 1) == doctest::Approx(std::tan(std::numbers::pi * 0.475)));

  SUBCASE("consistent with the cdf") {
    for (int df : {1, 2, 4, 17, 98, 287, 5000}) {
      for (double p : {0.001, 0.025, 0.2, 0.6, 0.95, 0.999}) {
        CHECK(std::abs(t_cdf(t_quantile(p, df), df) - p) < 1e-8);
      }
    }
  }
  CHECK(code_of([] { t_quantile(1.0, 5); }) == ErrorCode::kDomain);
  CHECK(code_of([] { t_quantile(0.3, 0); }) == ErrorCode::kDomain);
}

TEST_CASE("bvn_rect_prob") {
  const BvnSpec standard{0, 0, 1, 1, 0.5};
  CHECK(std::abs(bvn_rect_prob(standard, -kInf, kInf, -kInf, kInf) - 1.0) < 1e-10);
  CHECK(std::abs(bvn_rect_prob({1, -2, 3, 0.5, -0.9}, -kInf, kInf, -kInf, kInf) - 1.0) <
        1e-10);

  SUBCASE("orthant probability") {
    const double expected = 0.25 + std::asin(0.5) / (2 * std::numbers::pi);
    CHECK(std::abs(bvn_rect_prob(standard, 0, kInf, 0, kInf) - expected) < 1e-12);
    for (double r : {-0.95, -0.6, -0.2, 0.1, 0.4, 0.8, 0.93, 0.99}) {
      const double p = bvn_rect_prob({0, 0, 1, 1, r}, 0, kInf, 0, kInf);
      CHECK(std::abs(p - (0.25 + std::asin(r) / (2 * std::numbers::pi))) < 1e-12);
    }
  }
  SUBCASE("independence factorization") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int i = 0; i < 200; ++i) {
      const BvnSpec spec{u(gen), u(gen), 0.2 + std::abs(u(gen)), 0.2 + std::abs(u(gen)), 0.0};
      double a = u(gen), b = u(gen), c = u(gen), d = u(gen);
      if (a > b) std::swap(a, b);
      if (c > d) std::swap(c, d);
      const double s1 = std::sqrt(spec.var1);
      const double s2 = std::sqrt(spec.var2);
      const double product =
          (std_normal_cdf((b - spec.mean1) / s1) - std_normal_cdf((a - spec.mean1) / s1)) *
          (std_normal_cdf((d - spec.mean2) / s2) - std_normal_cdf((c - spec.mean2) / s2));
      CHECK(std::abs(bvn_rect_prob(spec, a, b, c, d) - product) < 1e-12);
    }
  }
  SUBCASE("additive over disjoint rectangles") {
    const BvnSpec spec{0.3, -0.1, 1.7, 0.4, -0.62};
    const double whole = bvn_rect_prob(spec, -1, 2, -kInf, 0.5);
    const double left = bvn_rect_prob(spec, -1, 0.25, -kInf, 0.5);
    const double right = bvn_rect_prob(spec, 0.25, 2, -kInf, 0.5);
    CHECK(std::abs(whole - left - right) < 1e-13);
  }
  SUBCASE("degenerate correlations") {
    CHECK(std::abs(bvn_rect_prob({0, 0, 1, 1, 1.0}, 0, kInf, 1, kInf) - std_normal_cdf(-1)) <
          1e-14);
    // Y = -X: {X > -1, Y < 1} is just {X > -1}.
    CHECK(std::abs(bvn_rect_prob({0, 0, 1, 1, -1.0}, -1, kInf, -kInf, 1) - std_normal_cdf(1)) <
          1e-14);
  }
  SUBCASE("invalid input") {
    CHECK(code_of([&] { bvn_rect_prob(standard, 1, 0, 0, 1); }) == ErrorCode::kDomain);
    CHECK(code_of([&] { bvn_rect_prob(standard, 0, 1, 2, 1); }) == ErrorCode::kDomain);
    CHECK(code_of([] { bvn_rect_prob({0, 0, 0, 1, 0}, 0, 1, 0, 1); }) == ErrorCode::kDomain);
    CHECK(code_of([] { bvn_rect_prob({0, 0, 1, 1, 1.2}, 0, 1, 0, 1); }) == ErrorCode::kDomain);
  }
  SUBCASE("against a Monte Carlo oracle") {
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int i = 0; i < 5; ++i) {
      const double m1 = u(gen), m2 = u(gen);
      const double v1 = 0.3 + 2 * std::abs(u(gen)), v2 = 0.3 + 2 * std::abs(u(gen));
      const double r = 0.97 * u(gen);
      double a = m1 + 2 * u(gen), b = m1 + 2 * u(gen), c = m2 + 2 * u(gen), d = m2 + 2 * u(gen);
      if (a > b) std::swap(a, b);
      if (c > d) std::swap(c, d);
      if (i == 0) b = kInf;
      const auto mc = oracle::bvn_rect_mc(m1, m2, v1, v2, r, a, b, c, d, 1000000, 77 + i);
      const double p = bvn_rect_prob({m1, m2, v1, v2, r}, a, b, c, d);
      CHECK(std::abs(p - mc.p) <= 4 * std::max(mc.se, 1e-6));
    }
  }
}

TEST_CASE("find_root") {
  CHECK(std::abs(find_root([](double x) { return x - 1; }, 0, 2, 1e-12).root - 1) < 1e-12);
  CHECK(std::abs(find_root([](double x) { return x * x - 2; }, 0, 2, 1e-12).root -
                 std::numbers::sqrt2) < 1e-10);
  CHECK(std::abs(find_root([](double x) { return std_normal_cdf(x) - 0.975; }, 0, 5, 1e-12)
                     .root -
                 1.959964) < 1e-6);
  CHECK(code_of([] { find_root([](double x) { return x * x + 1; }, -1, 1, 1e-9); }) ==
        ErrorCode::kBracket);

  SUBCASE("terminates on random monotone functions") {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(0.01, 3.0);
    for (int i = 0; i < 300; ++i) {
      const double a = u(gen), b = u(gen), c = u(gen) - 1.5, s = (i % 2 ? 1.0 : -1.0);
      const auto f = [=](double x) { return s * (a * x * x * x + b * x + c + std::atan(x)); };
      const double tol = 1e-10;
      const auto r = find_root(f, -10, 10, tol);
      const bool small_residual = std::abs(f(r.root)) <= tol;
      const bool narrow_bracket = (f(r.root - tol) > 0) != (f(r.root + tol) > 0);
      CHECK((small_residual || narrow_bracket));
    }
  }
}

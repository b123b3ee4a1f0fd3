#include <cmath>
#include <random>

#include "doctest.h"
#include "hybridctl/borrowing.hpp"
#include "hybridctl/dataset.hpp"
#include "hybridctl/error.hpp"
#include "hybridctl/numerics.hpp"

using namespace hybridctl;

namespace {

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected hybridctl::Error");
  return ErrorCode::kUsage;
}

HybridData random_hybrid(std::mt19937_64& gen) {
  std::uniform_int_distribution<int> n(2, 300);
  std::uniform_real_distribution<double> mean(-20, 20);
  std::uniform_real_distribution<double> sd(0.1, 15);
  return {{n(gen), mean(gen), sd(gen)}, {n(gen), mean(gen), sd(gen)},
          {n(gen), mean(gen), sd(gen)}};
}

}  // namespace

TEST_CASE("SummaryStat validation") {
  CHECK_NOTHROW(SummaryStat{2, 0.0, 0.0}.validate());
  CHECK(code_of([] { SummaryStat{1, 0.0, 1.0}.validate(); }) == ErrorCode::kDomain);
  CHECK(code_of([] { SummaryStat{10, 0.0, -1.0}.validate(); }) == ErrorCode::kDomain);
  CHECK(code_of([] { SummaryStat{10, NAN, 1.0}.validate(); }) == ErrorCode::kDomain);
}

TEST_CASE("t1_statistic") {
  const SummaryStat current{140, -8.7, 7.3};
  const SummaryStat historical{149, -8.1, 8.3};
  // (-8.7 + 8.1) / sqrt(7.3^2/140 + 8.3^2/149)
  const double direct = -0.6 / std::sqrt(7.3 * 7.3 / 140 + 8.3 * 8.3 / 149);
  CHECK(std::abs(direct - (-0.6534)) < 1e-3);
  CHECK(t1_statistic(current, historical) == doctest::Approx(direct).epsilon(1e-14));
  CHECK(t1_statistic(historical, current) == -t1_statistic(current, historical));
  CHECK(t1_statistic({20, 3.0, 1.0}, {50, 3.0, 9.0}) == 0.0);
  CHECK(code_of([] { t1_statistic({10, 1.0, 0.0}, {10, 2.0, 0.0}); }) ==
        ErrorCode::kDegenerateVariance);
}

TEST_CASE("pooled_statistic") {
  const HybridData data = case_study_data();
  const double t0 = pooled_statistic(data, 0.0);
  CHECK(std::abs(t0 - (-1.312)) < 1e-3);
  CHECK(std::abs(numerics::std_normal_cdf(t0) - 0.0947) < 5e-4);
  CHECK(std::abs(pooled_statistic(data, 0.99) - (-1.85)) < 0.01);
  CHECK(std::abs(pooled_statistic(data, 0.81) - (-1.81)) < 0.01);
  CHECK(code_of([&] { pooled_statistic(data, 1.01); }) == ErrorCode::kDomain);
  CHECK(code_of([&] { pooled_statistic(data, -0.1); }) == ErrorCode::kDomain);
  CHECK(code_of([] { pooled_statistic({{5, 0, 0}, {5, 1, 0}, {5, 2, 0}}, 0.5); }) ==
        ErrorCode::kDegenerateVariance);

  SUBCASE("a = 0 is the two-sample z") {
    std::mt19937_64 gen(99);
    for (int i = 0; i < 100; ++i) {
      const HybridData d = random_hybrid(gen);
      const double z = (d.treatment.mean - d.current_control.mean) /
                       std::sqrt(d.treatment.sd * d.treatment.sd / d.treatment.n +
                                 d.current_control.sd * d.current_control.sd /
                                     d.current_control.n);
      CHECK(pooled_statistic(d, 0.0) == doctest::Approx(z).epsilon(1e-12));
      CHECK(two_sample_z(d.treatment, d.current_control) == doctest::Approx(z).epsilon(1e-12));
    }
  }
  SUBCASE("continuous in a") {
    std::mt19937_64 gen(7);
    for (int i = 0; i < 20; ++i) {
      const HybridData d = random_hybrid(gen);
      double prev = pooled_statistic(d, 0.0);
      for (int k = 1; k <= 10000; ++k) {
        const double cur = pooled_statistic(d, k / 10000.0);
        CHECK(std::abs(cur - prev) < 0.05);
        prev = cur;
      }
    }
  }
}

TEST_CASE("weight_t") {
  CHECK(weight_t(0.0, 1) == 1.0);
  CHECK(weight_t(0.0, 287) == 1.0);
  CHECK(std::abs(weight_t(1.6606, 98) - 0.25) < 0.005);
  CHECK(std::abs(weight_t(-0.6534, 287) - 0.81) < 0.005);
  CHECK(code_of([] { weight_t(1.0, 0); }) == ErrorCode::kDomain);

  SUBCASE("even and decreasing in |t1|") {
    for (int df : {1, 10, 98, 287}) {
      double prev = 1.0;
      for (double t = 0.01; t < 6; t += 0.01) {
        CHECK(weight_t(t, df) == weight_t(-t, df));
        CHECK(weight_t(t, df) < prev);
        prev = weight_t(t, df);
      }
    }
  }
  SUBCASE("Gaussian limit") {
    for (double t = -4; t <= 4; t += 0.25) {
      CHECK(std::abs(weight_t(t, 1000000) - std::exp(-t * t / 2)) < 1e-4);
    }
  }
}

TEST_CASE("weight_logistic") {
  CHECK(std::abs(weight_logistic(0.0, kDbL1) - 0.9994) < 1e-4);
  CHECK(std::abs(weight_logistic(1.96, kDbL1) - 0.20) < 0.01);
  CHECK(std::abs(weight_logistic(-0.6534, kDbL1) - 0.99) < 0.005);
  CHECK(weight_logistic(0.0, {-1000.0, 1.0}) <= 1.0);
  CHECK(weight_logistic(1000.0, {0.0, 1.0}) >= 0.0);

  SUBCASE("even and nonincreasing") {
    for (const auto& p : {kDbL1, kDbL2, LogisticParams{0.0, 0.0}}) {
      double prev = 1.0;
      for (double t = 0.0; t < 6; t += 0.01) {
        CHECK(weight_logistic(t, p) == weight_logistic(-t, p));
        CHECK(weight_logistic(t, p) <= prev);
        prev = weight_logistic(t, p);
      }
    }
  }
}

TEST_CASE("fit_logistic_params") {
  {
    const auto fit = fit_logistic_params({1.0, 0.5}, {2.0, 0.5});
    CHECK(std::abs(fit.params.beta0) < 1e-12);
    CHECK(std::abs(fit.params.beta1) < 1e-12);
    CHECK(fit.monotone);
  }
  {
    const auto fit = fit_logistic_params({1.65, 0.5}, {1.96, 0.2});
    CHECK(std::abs(fit.params.beta0 - (-7.380)) < 0.01);
    CHECK(std::abs(fit.params.beta1 - 4.473) < 0.01);
  }
  {
    // The printed DB-L2 intercept differs; the anchors imply -7.344.
    const auto fit = fit_logistic_params({1.96, 0.5}, {2.33, 0.2});
    CHECK(std::abs(fit.params.beta0 - (-7.344)) < 0.01);
    CHECK(std::abs(fit.params.beta1 - 3.747) < 0.01);
  }
  {
    const auto fit = fit_logistic_params({1.64, 0.5}, {1.96, 0.2});
    CHECK(std::abs(fit.params.beta0 - (-7.105)) < 0.01);
    CHECK(std::abs(fit.params.beta1 - 4.332) < 0.01);
  }
  CHECK(code_of([] { fit_logistic_params({1.0, 0.3}, {1.0, 0.6}); }) ==
        ErrorCode::kSingularSystem);
  CHECK(code_of([] { fit_logistic_params({1.0, 0.0}, {2.0, 0.6}); }) == ErrorCode::kDomain);
  CHECK_FALSE(fit_logistic_params({1.0, 0.2}, {2.0, 0.6}).monotone);

  SUBCASE("round trip through weight_logistic") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> t(0.0, 4.0);
    std::uniform_real_distribution<double> w(0.01, 0.99);
    for (int i = 0; i < 200; ++i) {
      const double ta = t(gen), tb = t(gen), wa = w(gen), wb = w(gen);
      if (std::abs(ta - tb) < 1e-3) continue;
      const auto fit = fit_logistic_params({ta, wa}, {tb, wb});
      CHECK(std::abs(weight_logistic(ta, fit.params) - wa) < 1e-12);
      CHECK(std::abs(weight_logistic(tb, fit.params) - wb) < 1e-12);
    }
  }
}

TEST_CASE("method validation") {
  CHECK_NOTHROW(validate_method(method::Fixed{1.0}));
  CHECK(code_of([] { validate_method(method::Fixed{1.5}); }) == ErrorCode::kDomain);
  CHECK(code_of([] { validate_method(method::DbL{{0.0, -1.0}}); }) == ErrorCode::kDomain);
  CHECK(code_of([] { validate_method(method::Ttp{1.0}); }) == ErrorCode::kDomain);
  CHECK(code_of([] { validate_method(method::Eq{0.0, 0.05}); }) == ErrorCode::kDomain);
  CHECK(method_name(method::DbL{kDbL2}) == "DB-L2");
  CHECK(is_dynamic(method::DbT{}));
  CHECK(is_test_then_pool(method::Eq{}));
}

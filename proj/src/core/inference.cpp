#include "hybridctl/inference.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include "hybridctl/error.hpp"
#include "hybridctl/numerics.hpp"

namespace hybridctl {

namespace {

double one_sided_normal_p(double statistic, Sidedness side) {
  switch (side) {
    case Sidedness::kLower:
      return numerics::std_normal_cdf(statistic);
    case Sidedness::kUpper:
      return numerics::std_normal_cdf(-statistic);
    case Sidedness::kTwoSided:
      return 2.0 * numerics::std_normal_cdf(-std::abs(statistic));
  }
  return 1.0;
}

void require_supported_for_bootstrap(const WeightMethod& m) {
  if (is_test_then_pool(m)) {
    fail(ErrorCode::kUsage,
         "bootstrap test applies to fixed, DB-T and DB-L weights; use the "
         "test-then-pool test for TTP/EQ");
  }
}

}  // namespace

const char* sidedness_name(Sidedness s) {
  switch (s) {
    case Sidedness::kLower:
      return "lower";
    case Sidedness::kUpper:
      return "upper";
    case Sidedness::kTwoSided:
      return "two-sided";
  }
  return "?";
}

void BootstrapConfig::validate() const {
  if (b_reps < 100) fail(ErrorCode::kDomain, "bootstrap needs at least 100 replicates");
  if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorCode::kDomain, "alpha must lie in (0, 1)");
  if (!std::isfinite(mu_hat)) fail(ErrorCode::kDomain, "mu_hat must be finite");
}

SummaryStat draw_summary(int n, double mean, double sd, StreamRng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::chi_squared_distribution<double> chi2(static_cast<double>(n - 1));
  const double z = normal(rng);
  const double q = chi2(rng);
  return {n, mean + sd / std::sqrt(static_cast<double>(n)) * z,
          sd * std::sqrt(q / (n - 1))};
}

HybridData draw_null_replicate(const HybridData& data, double mu_hat, StreamRng& rng) {
  HybridData rep;
  rep.treatment = draw_summary(data.treatment.n, mu_hat, data.treatment.sd, rng);
  rep.current_control =
      draw_summary(data.current_control.n, mu_hat, data.current_control.sd, rng);
  rep.historical_control =
      draw_summary(data.historical_control.n, mu_hat, data.historical_control.sd, rng);
  return rep;
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

double weight_given_t1(const WeightMethod& m, const HybridData& data, double t1) {
  return std::visit(
      overloaded{
          [](const method::Fixed& f) { return f.a; },
          [&](const method::DbT&) {
            return weight_t(t1, data.current_control.n + data.historical_control.n - 2);
          },
          [&](const method::DbL& l) { return weight_logistic(t1, l.params); },
          [&](const method::Ttp& t) { return ttp_pool_decision(t1, t.alpha_h1) ? 1.0 : 0.0; },
          [&](const method::Eq& e) {
            return eq_pool_decision(t1, data.current_control, data.historical_control,
                                    EqConfig{e.delta, e.alpha_h2})
                       ? 1.0
                       : 0.0;
          },
      },
      m);
}

}  // namespace

double borrowing_weight(const WeightMethod& m, const HybridData& data) {
  if (std::holds_alternative<method::Fixed>(m)) return std::get<method::Fixed>(m).a;
  return weight_given_t1(m, data, t1_statistic(data.current_control, data.historical_control));
}

void replicate_statistics(const HybridData& data, std::span<const WeightMethod> methods,
                          double mu_hat, std::uint64_t seed, std::uint64_t outer,
                          std::uint64_t b, std::span<double> out) {
  StreamRng rng(seed, StreamRng::Domain::kBootstrap, outer, b);
  const HybridData rep = draw_null_replicate(data, mu_hat, rng);
  const double t1 = t1_statistic(rep.current_control, rep.historical_control);
  for (std::size_t i = 0; i < methods.size(); ++i) {
    out[i] = pooled_statistic(rep, weight_given_t1(methods[i], rep, t1));
  }
}

bool at_least_as_extreme(double replicate, double observed, Sidedness side) {
  switch (side) {
    case Sidedness::kLower:
      return replicate <= observed;
    case Sidedness::kUpper:
      return replicate >= observed;
    case Sidedness::kTwoSided:
      return std::abs(replicate) >= std::abs(observed);
  }
  return false;
}

std::vector<double> bootstrap_p_values(const HybridData& data,
                                       std::span<const WeightMethod> methods,
                                       std::span<const double> observed,
                                       const BootstrapConfig& config, std::uint64_t outer) {
  std::vector<long> hits(methods.size(), 0);
  std::vector<double> stats(methods.size());
  for (int b = 0; b < config.b_reps; ++b) {
    replicate_statistics(data, methods, config.mu_hat, config.seed, outer,
                         static_cast<std::uint64_t>(b), stats);
    for (std::size_t i = 0; i < methods.size(); ++i) {
      if (at_least_as_extreme(stats[i], observed[i], config.sidedness)) ++hits[i];
    }
  }
  std::vector<double> p(methods.size());
  for (std::size_t i = 0; i < methods.size(); ++i) {
    p[i] = static_cast<double>(hits[i]) / config.b_reps;
  }
  return p;
}

double empirical_quantile(std::vector<double> values, double q) {
  if (values.empty()) fail(ErrorCode::kDomain, "quantile of an empty sample");
  const auto count = static_cast<double>(values.size());
  // The small offset keeps products such as 0.05 * 10000 from rounding up.
  auto rank = static_cast<std::size_t>(std::ceil(q * count - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  auto nth = values.begin() + static_cast<std::ptrdiff_t>(rank - 1);
  std::nth_element(values.begin(), nth, values.end());
  return *nth;
}

TestOutcome bootstrap_test(const HybridData& data, const WeightMethod& m,
                           const BootstrapConfig& config) {
  data.validate();
  validate_method(m);
  config.validate();
  require_supported_for_bootstrap(m);

  TestOutcome out;
  out.t1 = t1_statistic(data.current_control, data.historical_control);
  out.weight = weight_given_t1(m, data, out.t1);
  out.statistic = pooled_statistic(data, out.weight);
  out.alpha_used = config.alpha;

  const auto reps = static_cast<std::size_t>(config.b_reps);
  std::vector<double> replicates(reps);
  const WeightMethod methods[] = {m};
  const auto fill = [&](std::size_t begin, std::size_t end) {
    for (std::size_t b = begin; b < end; ++b) {
      replicate_statistics(data, methods, config.mu_hat, config.seed, 0, b,
                           std::span<double>(&replicates[b], 1));
    }
  };
  const auto workers = static_cast<std::size_t>(std::clamp(config.workers, 1, 256));
  if (workers == 1) {
    fill(0, reps);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (reps + workers - 1) / workers;
    for (std::size_t begin = 0; begin < reps; begin += chunk) {
      pool.emplace_back(fill, begin, std::min(reps, begin + chunk));
    }
  }

  long hits = 0;
  for (double t : replicates) {
    if (at_least_as_extreme(t, out.statistic, config.sidedness)) ++hits;
  }
  out.p_value = static_cast<double>(hits) / config.b_reps;

  switch (config.sidedness) {
    case Sidedness::kLower:
      out.critical_value = empirical_quantile(replicates, config.alpha);
      break;
    case Sidedness::kUpper:
      out.critical_value = empirical_quantile(replicates, 1.0 - config.alpha);
      break;
    case Sidedness::kTwoSided:
      out.critical_value = empirical_quantile(std::move(replicates), 1.0 - config.alpha / 2.0);
      break;
  }
  out.reject = out.p_value <= config.alpha;
  return out;
}

TestOutcome normal_test(const HybridData& data, double a, double alpha, Sidedness side) {
  data.validate();
  if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorCode::kDomain, "alpha must lie in (0, 1)");
  TestOutcome out;
  out.t1 = t1_statistic(data.current_control, data.historical_control);
  out.weight = a;
  out.statistic = pooled_statistic(data, a);
  out.alpha_used = alpha;
  out.p_value = one_sided_normal_p(out.statistic, side);
  switch (side) {
    case Sidedness::kLower:
      out.critical_value = numerics::std_normal_quantile(alpha);
      break;
    case Sidedness::kUpper:
      out.critical_value = numerics::std_normal_quantile(1.0 - alpha);
      break;
    case Sidedness::kTwoSided:
      out.critical_value = numerics::std_normal_quantile(1.0 - alpha / 2.0);
      break;
  }
  out.reject = out.p_value <= alpha;
  return out;
}

TestOutcome ttp_eq_test_at(const HybridData& data, const WeightMethod& m,
                           double alpha_star, Sidedness side) {
  if (!is_test_then_pool(m)) {
    fail(ErrorCode::kUsage, "test-then-pool test requires a TTP or EQ method");
  }
  TestOutcome out;
  out.t1 = t1_statistic(data.current_control, data.historical_control);
  const bool pool = weight_given_t1(m, data, out.t1) == 1.0;
  out.pooled = pool;
  out.weight = pool ? 1.0 : 0.0;
  out.statistic = pooled_statistic(data, out.weight);
  out.alpha_used = alpha_star;
  const double z = numerics::std_normal_quantile(1.0 - alpha_star / 2.0);
  out.p_value = one_sided_normal_p(out.statistic, side);
  switch (side) {
    case Sidedness::kLower:
      out.critical_value = -z;
      out.reject = out.statistic < -z;
      break;
    case Sidedness::kUpper:
      out.critical_value = z;
      out.reject = out.statistic > z;
      break;
    case Sidedness::kTwoSided:
      out.critical_value = z;
      out.reject = std::abs(out.statistic) > z;
      break;
  }
  return out;
}

TestOutcome ttp_eq_test(const HybridData& data, const WeightMethod& m,
                        const DesignParams& design, double alpha, Sidedness side) {
  data.validate();
  validate_method(m);
  if (!is_test_then_pool(m)) {
    fail(ErrorCode::kUsage, "test-then-pool test requires a TTP or EQ method");
  }
  const AdjustedAlpha adjusted =
      std::holds_alternative<method::Ttp>(m)
          ? adjusted_alpha_ttp(design, alpha, std::get<method::Ttp>(m).alpha_h1)
          : adjusted_alpha_eq(design, alpha,
                              EqConfig{std::get<method::Eq>(m).delta,
                                       std::get<method::Eq>(m).alpha_h2});
  return ttp_eq_test_at(data, m, adjusted.alpha_star, side);
}

}  // namespace hybridctl

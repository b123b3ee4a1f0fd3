#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hybridctl/borrowing.hpp"
#include "hybridctl/decision.hpp"
#include "hybridctl/rng.hpp"

namespace hybridctl {

enum class Sidedness { kLower, kUpper, kTwoSided };

const char* sidedness_name(Sidedness s);

struct BootstrapConfig {
  int b_reps = 10000;
  std::uint64_t seed = 20240601;
  double mu_hat = 0.0;  // common null mean; any value gives the same law
  Sidedness sidedness = Sidedness::kTwoSided;
  double alpha = 0.05;
  int workers = 1;  // hint only; results never depend on it

  void validate() const;
};

struct TestOutcome {
  double weight = 0.0;
  double statistic = 0.0;
  double critical_value = 0.0;
  double p_value = 1.0;
  std::optional<bool> pooled;  // set for TTP / EQ
  double alpha_used = 0.0;
  double t1 = 0.0;
  bool reject = false;
};

/// Sufficient statistics of n iid N(mean, sd^2) draws: the sample mean is
/// N(mean, sd^2/n) and the sample variance sd^2 chi2(n-1)/(n-1), independent.
SummaryStat draw_summary(int n, double mean, double sd, StreamRng& rng);

/// Replicate dataset under the null: every arm centred at mu_hat with its
/// observed sd and size.
HybridData draw_null_replicate(const HybridData& data, double mu_hat, StreamRng& rng);

/// Historical weight a method assigns to a dataset. TTP / EQ return 1 when
/// they pool and 0 otherwise.
double borrowing_weight(const WeightMethod& m, const HybridData& data);

/// T*(w*) for bootstrap replicate `b` of stream `outer`, one entry per
/// method. All methods see the same replicate dataset.
void replicate_statistics(const HybridData& data, std::span<const WeightMethod> methods,
                          double mu_hat, std::uint64_t seed, std::uint64_t outer,
                          std::uint64_t b, std::span<double> out);

/// Bootstrap p-values for several fixed/dynamic methods sharing the same
/// replicate datasets. `observed` holds each method's observed statistic.
/// Runs serially; used inside outer parallel loops.
std::vector<double> bootstrap_p_values(const HybridData& data,
                                       std::span<const WeightMethod> methods,
                                       std::span<const double> observed,
                                       const BootstrapConfig& config, std::uint64_t outer);

/// Whether `replicate` is at least as extreme as `observed` for the side.
bool at_least_as_extreme(double replicate, double observed, Sidedness side);

/// Empirical quantile: ascending order statistic number ceil(q B) (1-based).
double empirical_quantile(std::vector<double> values, double q);

/// Parametric-bootstrap test for fixed, DB-T and DB-L weights.
TestOutcome bootstrap_test(const HybridData& data, const WeightMethod& m,
                           const BootstrapConfig& config);

/// Normal-reference z test at a fixed weight.
TestOutcome normal_test(const HybridData& data, double a, double alpha, Sidedness side);

/// Test-then-pool (TTP or EQ) test against z_{1 - alpha*/2}, where alpha* is
/// the adjusted level for `design` at two-sided nominal `alpha`. One-sided
/// variants use the same threshold on a single tail.
TestOutcome ttp_eq_test(const HybridData& data, const WeightMethod& m,
                        const DesignParams& design, double alpha,
                        Sidedness side = Sidedness::kTwoSided);

/// Same, with alpha* already known.
TestOutcome ttp_eq_test_at(const HybridData& data, const WeightMethod& m,
                           double alpha_star, Sidedness side);

}  // namespace hybridctl

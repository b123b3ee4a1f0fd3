#pragma once

#include "hybridctl/borrowing.hpp"

namespace hybridctl {

/// True design parameters used to calibrate the test-then-pool procedures.
/// Sigmas are standard deviations; mu_diff is mu_c - mu_h.
struct DesignParams {
  int n_t = 0;
  int n_c = 0;
  int n_h = 0;
  double sigma_t = 1.0;
  double sigma_c = 1.0;
  double sigma_h = 1.0;
  double mu_diff = 0.0;

  /// Same sizes and standard deviations as the observed data, zero shift.
  static DesignParams from_data(const HybridData& data);
  /// Common variance for all three arms.
  static DesignParams with_variance(int n_t, int n_c, int n_h, double variance,
                                    double mu_diff = 0.0);

  void validate() const;
};

struct EqConfig {
  double delta = 1.5;
  double alpha_h2 = 0.05;

  void validate() const;
};

/// Pool (use T(1)) iff |t1| < z_{1 - alpha_h1/2}; equality does not pool.
bool ttp_pool_decision(double t1, double alpha_h1);

/// Largest |t1| that still pools under the equivalence rule; <= 0 means the
/// acceptance interval is empty. The standard error uses s_c^2/n_c + s_h^2/n_h.
double eq_pool_bound(const SummaryStat& current, const SummaryStat& historical,
                     const EqConfig& config);

bool eq_pool_decision(double t1, const SummaryStat& current, const SummaryStat& historical,
                      const EqConfig& config);

struct AdjustedAlpha {
  double alpha_star = 0.0;
  double residual = 0.0;  // nominal alpha minus overall rejection at alpha_star
};

/// Overall two-sided H0 rejection probability of the pool/no-pool procedure
/// run at per-branch level `alpha_star`, when pooling happens exactly on
/// |c_bar - h_bar| <= pool_half_width (in endpoint units).
double overall_rejection(const DesignParams& design, double alpha_star,
                         double pool_half_width);

/// Adjusted level for the original test-then-pool procedure.
AdjustedAlpha adjusted_alpha_ttp(const DesignParams& design, double alpha,
                                 double alpha_h1);

/// Adjusted level for the equivalence-based procedure.
AdjustedAlpha adjusted_alpha_eq(const DesignParams& design, double alpha,
                                const EqConfig& config);

}  // namespace hybridctl

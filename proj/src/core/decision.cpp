#include "hybridctl/decision.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hybridctl/error.hpp"
#include "hybridctl/numerics.hpp"

namespace hybridctl {

using numerics::kInf;

namespace {

void require_alpha(double alpha, const char* name) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    std::ostringstream msg;
    msg << name << " must lie in (0, 1)";
    fail(ErrorCode::kDomain, msg.str());
  }
}

double control_diff_variance(const DesignParams& d) {
  return d.sigma_h * d.sigma_h / d.n_h + d.sigma_c * d.sigma_c / d.n_c;
}

AdjustedAlpha solve_adjusted_alpha(const DesignParams& design, double alpha,
                                   double pool_half_width) {
  design.validate();
  require_alpha(alpha, "alpha");
  // Never pooling leaves the plain two-sample test, which is exact at alpha.
  if (!(pool_half_width > 0.0)) return {alpha, 0.0};

  const auto residual = [&](double alpha_star) {
    return alpha - overall_rejection(design, alpha_star, pool_half_width);
  };

  const double lo = alpha / 10.0;
  const double hi = std::min(0.999, std::max(0.5, 10.0 * alpha));

  // The residual must fall monotonically across the bracket.
  constexpr int kGrid = 24;
  double previous = residual(lo);
  for (int i = 1; i <= kGrid; ++i) {
    const double x = lo + (hi - lo) * i / kGrid;
    const double current = residual(x);
    if (current > previous + 1e-12) {
      std::ostringstream msg;
      msg << "adjusted-alpha residual is not monotone near alpha*=" << x;
      fail(ErrorCode::kNumericalFailure, msg.str());
    }
    previous = current;
  }

  try {
    const auto root = numerics::find_root(residual, lo, hi, 1e-13);
    return {root.root, root.residual};
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kBracket) throw;
    std::ostringstream msg;
    msg << "no adjusted alpha in (" << lo << ", " << hi << "): " << e.what();
    fail(ErrorCode::kNumericalFailure, msg.str());
  }
}

}  // namespace

DesignParams DesignParams::from_data(const HybridData& data) {
  data.validate();
  return {data.treatment.n,       data.current_control.n, data.historical_control.n,
          data.treatment.sd,      data.current_control.sd, data.historical_control.sd,
          0.0};
}

DesignParams DesignParams::with_variance(int n_t, int n_c, int n_h, double variance,
                                         double mu_diff) {
  const double sd = std::sqrt(variance);
  return {n_t, n_c, n_h, sd, sd, sd, mu_diff};
}

void DesignParams::validate() const {
  if (n_t < 2 || n_c < 2 || n_h < 2) {
    fail(ErrorCode::kDomain, "design sample sizes must be >= 2");
  }
  for (double s : {sigma_t, sigma_c, sigma_h}) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      fail(ErrorCode::kDomain, "design standard deviations must be positive");
    }
  }
  if (!std::isfinite(mu_diff)) fail(ErrorCode::kDomain, "mu_diff must be finite");
}

void EqConfig::validate() const {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    fail(ErrorCode::kDomain, "equivalence margin must be positive");
  }
  require_alpha(alpha_h2, "alpha_h2");
}

bool ttp_pool_decision(double t1, double alpha_h1) {
  require_alpha(alpha_h1, "alpha_h1");
  return std::abs(t1) < numerics::std_normal_quantile(1.0 - alpha_h1 / 2.0);
}

double eq_pool_bound(const SummaryStat& current, const SummaryStat& historical,
                     const EqConfig& config) {
  config.validate();
  const double se2 = current.mean_variance() + historical.mean_variance();
  if (!(se2 > 0.0)) return kInf;
  return config.delta / std::sqrt(se2) -
         numerics::std_normal_quantile(1.0 - config.alpha_h2);
}

bool eq_pool_decision(double t1, const SummaryStat& current, const SummaryStat& historical,
                      const EqConfig& config) {
  return std::abs(t1) < eq_pool_bound(current, historical, config);
}

double overall_rejection(const DesignParams& design, double alpha_star,
                         double pool_half_width) {
  require_alpha(alpha_star, "alpha*");
  if (!(pool_half_width > 0.0)) return alpha_star;

  const DesignParams& d = design;
  const double n_pool = static_cast<double>(d.n_c + d.n_h);
  const double var_t = d.sigma_t * d.sigma_t;
  const double var_c = d.sigma_c * d.sigma_c;
  const double var_h = d.sigma_h * d.sigma_h;
  const double z = numerics::std_normal_quantile(1.0 - alpha_star / 2.0);
  const double var_diff = control_diff_variance(d);
  const double w = pool_half_width;

  // Pooled branch: T(1) = Y1 + shift with Y1 centred, paired with
  // Y2 = c_bar - h_bar ~ N(mu_c - mu_h, var_diff).
  const double v1 = var_t / d.n_t + (d.n_c * var_c + d.n_h * var_h) / (n_pool * n_pool);
  const double sd1 = std::sqrt(v1);
  const double shift = d.n_h * d.mu_diff / n_pool / sd1;
  const auto pooled = numerics::BvnSpec::from_covariance(
      0.0, d.mu_diff, 1.0, var_diff, (var_h - var_c) / n_pool / sd1);
  const double pooled_reject =
      numerics::bvn_rect_prob(pooled, z - shift, kInf, -w, w) +
      numerics::bvn_rect_prob(pooled, -kInf, -z - shift, -w, w);

  // Separate branch: T(0) = Y3, rejected outside the pooling window.
  const double sd0 = std::sqrt(var_t / d.n_t + var_c / d.n_c);
  const auto separate = numerics::BvnSpec::from_covariance(
      0.0, d.mu_diff, 1.0, var_diff, -(var_c / d.n_c) / sd0);
  const double separate_reject_in_window =
      numerics::bvn_rect_prob(separate, z, kInf, -w, w) +
      numerics::bvn_rect_prob(separate, -kInf, -z, -w, w);

  return pooled_reject + alpha_star - separate_reject_in_window;
}

AdjustedAlpha adjusted_alpha_ttp(const DesignParams& design, double alpha,
                                 double alpha_h1) {
  design.validate();
  require_alpha(alpha_h1, "alpha_h1");
  const double half_width = numerics::std_normal_quantile(1.0 - alpha_h1 / 2.0) *
                            std::sqrt(control_diff_variance(design));
  return solve_adjusted_alpha(design, alpha, half_width);
}

AdjustedAlpha adjusted_alpha_eq(const DesignParams& design, double alpha,
                                const EqConfig& config) {
  design.validate();
  config.validate();
  const double half_width =
      config.delta - numerics::std_normal_quantile(1.0 - config.alpha_h2) *
                         std::sqrt(control_diff_variance(design));
  return solve_adjusted_alpha(design, alpha, half_width);
}

}  // namespace hybridctl

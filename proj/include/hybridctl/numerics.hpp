#pragma once

#include <functional>
#include <limits>

namespace hybridctl::numerics {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Bivariate normal law of a pair (Y1, Y2). `corr` is the correlation
/// coefficient, not the covariance.
struct BvnSpec {
  double mean1 = 0.0;
  double mean2 = 0.0;
  double var1 = 1.0;
  double var2 = 1.0;
  double corr = 0.0;

  /// Builds a spec from a covariance entry instead of a correlation.
  static BvnSpec from_covariance(double mean1, double mean2, double var1,
                                 double var2, double cov);

  void validate() const;
};

double std_normal_cdf(double x);
double std_normal_pdf(double x);

/// Inverse of the standard normal cdf. Throws kDomain unless 0 < p < 1.
double std_normal_quantile(double p);

/// Student t density with `df` degrees of freedom.
double t_pdf(double x, int df);

/// Density ratio t_pdf(x, df) / t_pdf(0, df), evaluated without gamma
/// functions so it stays accurate for very large df.
double t_pdf_ratio(double x, int df);

double t_cdf(double x, int df);
double t_quantile(double p, int df);

/// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

/// Upper orthant probability P(X > h, Y > k) for standard margins with
/// correlation r. Infinite limits are allowed.
double bvn_upper(double h, double k, double r);

/// P(lo1 <= Y1 <= hi1, lo2 <= Y2 <= hi2). Bounds may be +/-kInf.
double bvn_rect_prob(const BvnSpec& spec, double lo1, double hi1, double lo2,
                     double hi2);

struct RootResult {
  double root = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

/// Brent-style bracketed root search (bisection with secant and inverse
/// quadratic steps). The bracket [lo, hi] must straddle a sign change.
/// Stops once |f(x)| <= tol or the bracket is narrower than tol.
RootResult find_root(const std::function<double(double)>& f, double lo,
                     double hi, double tol, int max_iter = 200);

}  // namespace hybridctl::numerics

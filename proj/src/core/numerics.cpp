#include "hybridctl/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "hybridctl/error.hpp"

namespace hybridctl::numerics {

namespace {

constexpr double kPi = std::numbers::pi;

struct GaussLegendre {
  std::vector<double> nodes;    // positive half, descending
  std::vector<double> weights;
};

// Nodes of the n-point Gauss-Legendre rule (n even), by Newton iteration on
// the Legendre recurrence.
GaussLegendre make_gauss_legendre(int n) {
  GaussLegendre rule;
  for (int i = 1; i <= n / 2; ++i) {
    double x = std::cos(kPi * (i - 0.25) / (n + 0.5));
    double derivative = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      derivative = n * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / derivative;
      x -= step;
      if (std::abs(step) < 1e-16) break;
    }
    rule.nodes.push_back(x);
    rule.weights.push_back(2.0 / ((1.0 - x * x) * derivative * derivative));
  }
  return rule;
}

const GaussLegendre& gl_rule(int level) {
  static const std::array<GaussLegendre, 3> rules = {
      make_gauss_legendre(6), make_gauss_legendre(12), make_gauss_legendre(20)};
  return rules[static_cast<std::size_t>(level)];
}

// Continued fraction for the incomplete beta (modified Lentz).
double beta_continued_fraction(double a, double b, double x) {
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-16;
  constexpr int kMaxIter = 200000;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  fail(ErrorCode::kNumericalFailure, "incomplete beta continued fraction did not converge");
}

// I_x(a, b) with the complement 1 - x supplied separately so callers can
// pass it without cancellation.
double incomplete_beta_split(double a, double b, double x, double one_minus_x) {
  if (x <= 0.0) return 0.0;
  if (one_minus_x <= 0.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log(one_minus_x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - front * beta_continued_fraction(b, a, one_minus_x) / b;
}

void require_df(int df) {
  if (df < 1) fail(ErrorCode::kDomain, "degrees of freedom must be >= 1");
}

}  // namespace

BvnSpec BvnSpec::from_covariance(double mean1, double mean2, double var1,
                                 double var2, double cov) {
  BvnSpec spec{mean1, mean2, var1, var2, 0.0};
  spec.validate();
  spec.corr = std::clamp(cov / std::sqrt(var1 * var2), -1.0, 1.0);
  return spec;
}

void BvnSpec::validate() const {
  if (!(var1 > 0.0) || !(var2 > 0.0) || !std::isfinite(var1) || !std::isfinite(var2)) {
    fail(ErrorCode::kDomain, "bivariate normal variances must be positive");
  }
  if (!(corr >= -1.0 && corr <= 1.0)) {
    fail(ErrorCode::kDomain, "bivariate normal correlation must lie in [-1, 1]");
  }
}

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double std_normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi);
}

double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    fail(ErrorCode::kDomain, "normal quantile requires 0 < p < 1");
  }
  if (p == 0.5) return 0.0;
  // Work in the lower tail, where Phi is evaluated without cancellation.
  const bool upper = p > 0.5;
  const double q = upper ? 1.0 - p : p;

  // Abramowitz-Stegun 26.2.23 starting point, then Halley refinement.
  const double t = std::sqrt(-2.0 * std::log(q));
  double x = -(t - (2.515517 + 0.802853 * t + 0.010328 * t * t) /
                       (1.0 + 1.432788 * t + 0.189269 * t * t + 0.001308 * t * t * t));
  for (int iter = 0; iter < 8; ++iter) {
    const double err = std_normal_cdf(x) - q;
    const double u = err / std_normal_pdf(x);
    const double step = u / (1.0 + 0.5 * x * u);
    x -= step;
    if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(x))) break;
  }
  return upper ? -x : x;
}

double t_pdf(double x, int df) {
  require_df(df);
  const double v = df;
  const double log_norm = std::lgamma(0.5 * (v + 1.0)) - std::lgamma(0.5 * v) -
                          0.5 * std::log(v * kPi);
  return std::exp(log_norm - 0.5 * (v + 1.0) * std::log1p(x * x / v));
}

double t_pdf_ratio(double x, int df) {
  require_df(df);
  const double v = df;
  return std::exp(-0.5 * (v + 1.0) * std::log1p(x * x / v));
}

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0) || !(x >= 0.0 && x <= 1.0)) {
    fail(ErrorCode::kDomain, "incomplete beta requires a, b > 0 and x in [0, 1]");
  }
  return incomplete_beta_split(a, b, x, 1.0 - x);
}

double t_cdf(double x, int df) {
  require_df(df);
  if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
  if (x == 0.0) return 0.5;
  const double v = df;
  const double x2 = x * x;
  // P(|T| > |x|) = I_{v/(v+x^2)}(v/2, 1/2)
  const double two_tail =
      incomplete_beta_split(0.5 * v, 0.5, v / (v + x2), x2 / (v + x2));
  return x > 0.0 ? 1.0 - 0.5 * two_tail : 0.5 * two_tail;
}

double t_quantile(double p, int df) {
  require_df(df);
  if (!(p > 0.0 && p < 1.0)) {
    fail(ErrorCode::kDomain, "t quantile requires 0 < p < 1");
  }
  if (p == 0.5) return 0.0;
  if (p < 0.5) return -t_quantile(1.0 - p, df);
  if (df == 1) return std::tan(kPi * (p - 0.5));

  // The t quantile is never smaller than the normal one.
  double lo = std_normal_quantile(p);
  double hi = std::max(2.0 * lo, 1.0);
  const auto f = [&](double x) { return t_cdf(x, df) - p; };
  while (f(hi) < 0.0) {
    lo = hi;
    hi *= 2.0;
  }
  if (f(lo) >= 0.0) return lo;
  return find_root(f, lo, hi, 1e-14).root;
}

double bvn_upper(double h, double k, double r) {
  if (h == kInf || k == kInf) return 0.0;
  if (h == -kInf) return k == -kInf ? 1.0 : std_normal_cdf(-k);
  if (k == -kInf) return std_normal_cdf(-h);
  if (r == 0.0) return std_normal_cdf(-h) * std_normal_cdf(-k);

  const double abs_r = std::abs(r);
  const GaussLegendre& rule = gl_rule(abs_r < 0.3 ? 0 : (abs_r < 0.75 ? 1 : 2));
  const std::size_t lg = rule.nodes.size();

  double hk = h * k;
  double bvn = 0.0;
  if (abs_r < 0.925) {
    const double hs = 0.5 * (h * h + k * k);
    const double asr = std::asin(r);
    for (std::size_t i = 0; i < lg; ++i) {
      for (const double sign : {-1.0, 1.0}) {
        const double sn = std::sin(0.5 * asr * (1.0 + sign * rule.nodes[i]));
        bvn += rule.weights[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
      }
    }
    bvn = bvn * asr / (4.0 * kPi) + std_normal_cdf(-h) * std_normal_cdf(-k);
  } else {
    if (r < 0.0) {
      k = -k;
      hk = -hk;
    }
    if (abs_r < 1.0) {
      const double as = (1.0 - r) * (1.0 + r);
      double a = std::sqrt(as);
      const double bs = (h - k) * (h - k);
      const double c = (4.0 - hk) / 8.0;
      const double d = (12.0 - hk) / 16.0;
      double asr = -0.5 * (bs / as + hk);
      if (asr > -100.0) {
        bvn = a * std::exp(asr) *
              (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as * as / 5.0);
      }
      if (hk > -100.0) {
        const double b = std::sqrt(bs);
        bvn -= std::exp(-0.5 * hk) * std::sqrt(2.0 * kPi) * std_normal_cdf(-b / a) * b *
               (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
      }
      a *= 0.5;
      for (std::size_t i = 0; i < lg; ++i) {
        for (const double sign : {-1.0, 1.0}) {
          const double xs = std::pow(a * (sign * rule.nodes[i] + 1.0), 2);
          const double rs = std::sqrt(1.0 - xs);
          asr = -0.5 * (bs / xs + hk);
          if (asr > -100.0) {
            const double sp = 1.0 + c * xs * (1.0 + d * xs);
            const double ep = std::exp(-hk * xs / (2.0 * (1.0 + rs) * (1.0 + rs))) / rs;
            bvn += a * rule.weights[i] * std::exp(asr) * (ep - sp);
          }
        }
      }
      bvn = -bvn / (2.0 * kPi);
    }
    if (r > 0.0) {
      bvn += std_normal_cdf(-std::max(h, k));
    } else if (h >= k) {
      bvn = -bvn;
    } else {
      const double lower = h < 0.0 ? std_normal_cdf(k) - std_normal_cdf(h)
                                   : std_normal_cdf(-h) - std_normal_cdf(-k);
      bvn = lower - bvn;
    }
  }
  return std::clamp(bvn, 0.0, 1.0);
}

double bvn_rect_prob(const BvnSpec& spec, double lo1, double hi1, double lo2,
                     double hi2) {
  spec.validate();
  if (std::isnan(lo1) || std::isnan(hi1) || std::isnan(lo2) || std::isnan(hi2) ||
      lo1 > hi1 || lo2 > hi2) {
    std::ostringstream msg;
    msg << "inverted rectangle bounds [" << lo1 << ", " << hi1 << "] x [" << lo2
        << ", " << hi2 << "]";
    fail(ErrorCode::kDomain, msg.str());
  }
  const double sd1 = std::sqrt(spec.var1);
  const double sd2 = std::sqrt(spec.var2);
  // Standardize; beyond 8.5 sd the remaining tail mass is below 1e-17.
  const auto standardize = [](double bound, double mean, double sd) {
    if (std::isinf(bound)) return bound;
    const double z = (bound - mean) / sd;
    if (z > 8.5) return kInf;
    if (z < -8.5) return -kInf;
    return z;
  };
  const double a1 = standardize(lo1, spec.mean1, sd1);
  const double b1 = standardize(hi1, spec.mean1, sd1);
  const double a2 = standardize(lo2, spec.mean2, sd2);
  const double b2 = standardize(hi2, spec.mean2, sd2);
  if (a1 == b1 || a2 == b2) return 0.0;

  if (spec.corr == 0.0) {
    const auto interval = [](double lo, double hi) {
      // Use whichever tail keeps the difference well conditioned.
      if (lo >= 0.0) return std_normal_cdf(-lo) - std_normal_cdf(-hi);
      return std_normal_cdf(hi) - std_normal_cdf(lo);
    };
    return interval(a1, b1) * interval(a2, b2);
  }

  const double r = spec.corr;
  const double p = bvn_upper(a1, a2, r) - bvn_upper(b1, a2, r) - bvn_upper(a1, b2, r) +
                   bvn_upper(b1, b2, r);
  return std::clamp(p, 0.0, 1.0);
}

RootResult find_root(const std::function<double(double)>& f, double lo, double hi,
                     double tol, int max_iter) {
  if (!(tol > 0.0)) fail(ErrorCode::kDomain, "root tolerance must be positive");
  double a = lo;
  double b = hi;
  double fa = f(a);
  double fb = f(b);
  if (fa == 0.0) return {a, fa, 0};
  if (fb == 0.0) return {b, fb, 0};
  if (std::isnan(fa) || std::isnan(fb) || (fa > 0.0) == (fb > 0.0)) {
    std::ostringstream msg;
    msg << "no sign change on [" << lo << ", " << hi << "]: f(lo)=" << fa
        << ", f(hi)=" << fb;
    fail(ErrorCode::kBracket, msg.str());
  }

  double c = a;
  double fc = fa;
  double d = b - a;
  double e = d;
  for (int iter = 1; iter <= max_iter; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = b - a;
      e = d;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double half_width = 0.5 * (c - b);
    if (std::abs(fb) <= tol || std::abs(half_width) <= 0.5 * tol) {
      return {b, fb, iter};
    }
    if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
      double p;
      double q;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * half_width * s;
        q = 1.0 - s;
      } else {
        const double qa = fa / fc;
        const double rb = fb / fc;
        p = s * (2.0 * half_width * qa * (qa - rb) - (b - a) * (rb - 1.0));
        q = (qa - 1.0) * (rb - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * half_width * q - std::abs(tol * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = half_width;
        e = d;
      }
    } else {
      d = half_width;
      e = d;
    }
    a = b;
    fa = fb;
    b += std::abs(d) > 0.25 * tol ? d : std::copysign(0.25 * tol, half_width);
    fb = f(b);
  }
  fail(ErrorCode::kNumericalFailure, "root finder exceeded its iteration budget");
}

}  // namespace hybridctl::numerics

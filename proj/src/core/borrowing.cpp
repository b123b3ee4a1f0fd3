#include "hybridctl/borrowing.hpp"

#include <cmath>
#include <sstream>

#include "hybridctl/error.hpp"
#include "hybridctl/numerics.hpp"

namespace hybridctl {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

bool open_unit(double p) { return p > 0.0 && p < 1.0; }

}  // namespace

void SummaryStat::validate(const char* arm) const {
  std::ostringstream msg;
  if (n < 2) {
    msg << arm << ": sample size must be >= 2 (got " << n << ")";
  } else if (!std::isfinite(mean)) {
    msg << arm << ": mean must be finite";
  } else if (!std::isfinite(sd) || sd < 0.0) {
    msg << arm << ": sd must be finite and >= 0 (got " << sd << ")";
  } else {
    return;
  }
  fail(ErrorCode::kDomain, msg.str());
}

void HybridData::validate() const {
  treatment.validate("treatment");
  current_control.validate("current control");
  historical_control.validate("historical control");
}

void LogisticParams::validate() const {
  if (!std::isfinite(beta0) || !std::isfinite(beta1) || beta1 < 0.0) {
    fail(ErrorCode::kDomain, "logistic parameters must be finite with beta1 >= 0");
  }
}

void validate_method(const WeightMethod& m) {
  std::visit(overloaded{
                 [](const method::Fixed& f) {
                   if (!(f.a >= 0.0 && f.a <= 1.0)) {
                     fail(ErrorCode::kDomain, "fixed borrowing weight must lie in [0, 1]");
                   }
                 },
                 [](const method::DbT&) {},
                 [](const method::DbL& l) { l.params.validate(); },
                 [](const method::Ttp& t) {
                   if (!open_unit(t.alpha_h1)) {
                     fail(ErrorCode::kDomain, "alpha_h1 must lie in (0, 1)");
                   }
                 },
                 [](const method::Eq& e) {
                   if (!(e.delta > 0.0) || !std::isfinite(e.delta)) {
                     fail(ErrorCode::kDomain, "equivalence margin must be positive");
                   }
                   if (!open_unit(e.alpha_h2)) {
                     fail(ErrorCode::kDomain, "alpha_h2 must lie in (0, 1)");
                   }
                 },
             },
             m);
}

bool is_dynamic(const WeightMethod& m) {
  return std::holds_alternative<method::DbT>(m) || std::holds_alternative<method::DbL>(m);
}

bool is_test_then_pool(const WeightMethod& m) {
  return std::holds_alternative<method::Ttp>(m) || std::holds_alternative<method::Eq>(m);
}

std::string method_name(const WeightMethod& m) {
  std::ostringstream out;
  std::visit(overloaded{
                 [&](const method::Fixed& f) { out << "fixed(a=" << f.a << ")"; },
                 [&](const method::DbT&) { out << "DB-T"; },
                 [&](const method::DbL& l) {
                   if (l.params.beta0 == kDbL1.beta0 && l.params.beta1 == kDbL1.beta1) {
                     out << "DB-L1";
                   } else if (l.params.beta0 == kDbL2.beta0 &&
                              l.params.beta1 == kDbL2.beta1) {
                     out << "DB-L2";
                   } else {
                     out << "DB-L(" << l.params.beta0 << "," << l.params.beta1 << ")";
                   }
                 },
                 [&](const method::Ttp& t) { out << "TTP(alpha_h1=" << t.alpha_h1 << ")"; },
                 [&](const method::Eq& e) {
                   out << "EQ(delta=" << e.delta << ",alpha_h2=" << e.alpha_h2 << ")";
                 },
             },
             m);
  return out.str();
}

double t1_statistic(const SummaryStat& current, const SummaryStat& historical) {
  const double se2 = current.mean_variance() + historical.mean_variance();
  if (!(se2 > 0.0)) {
    fail(ErrorCode::kDegenerateVariance, "T1: both control arms have zero variance");
  }
  return (current.mean - historical.mean) / std::sqrt(se2);
}

double pooled_statistic(const HybridData& data, double a) {
  if (!(a >= 0.0 && a <= 1.0)) {
    fail(ErrorCode::kDomain, "borrowing weight must lie in [0, 1]");
  }
  const SummaryStat& t = data.treatment;
  const SummaryStat& c = data.current_control;
  const SummaryStat& h = data.historical_control;
  const double denom_n = c.n + a * h.n;
  const double control_mean = (c.n * c.mean + a * h.n * h.mean) / denom_n;
  const double variance = t.mean_variance() +
                          (c.n * c.variance() + a * a * h.n * h.variance()) /
                              (denom_n * denom_n);
  if (!(variance > 0.0)) {
    fail(ErrorCode::kDegenerateVariance, "T(a): zero standard error");
  }
  return (t.mean - control_mean) / std::sqrt(variance);
}

double two_sample_z(const SummaryStat& treatment, const SummaryStat& control) {
  const double variance = treatment.mean_variance() + control.mean_variance();
  if (!(variance > 0.0)) {
    fail(ErrorCode::kDegenerateVariance, "two-sample z: zero standard error");
  }
  return (treatment.mean - control.mean) / std::sqrt(variance);
}

double weight_t(double t1, int df) { return numerics::t_pdf_ratio(std::abs(t1), df); }

double weight_logistic(double t1, const LogisticParams& params) {
  return 1.0 / (1.0 + std::exp(params.beta0 + params.beta1 * std::abs(t1)));
}

LogisticFit fit_logistic_params(std::pair<double, double> anchor1,
                                std::pair<double, double> anchor2) {
  const auto [t_a, w_a] = anchor1;
  const auto [t_b, w_b] = anchor2;
  if (!open_unit(w_a) || !open_unit(w_b)) {
    fail(ErrorCode::kDomain, "anchor weights must lie in (0, 1)");
  }
  if (t_a < 0.0 || t_b < 0.0 || !std::isfinite(t_a) || !std::isfinite(t_b)) {
    fail(ErrorCode::kDomain, "anchor t-values must be finite and >= 0");
  }
  if (t_a == t_b) {
    fail(ErrorCode::kSingularSystem, "logistic anchors share the same t-value");
  }
  // logit of the complement: beta0 + beta1 t = log(1/w - 1)
  const double y_a = std::log1p(-w_a) - std::log(w_a);
  const double y_b = std::log1p(-w_b) - std::log(w_b);
  LogisticFit fit;
  fit.params.beta1 = (y_b - y_a) / (t_b - t_a);
  fit.params.beta0 = y_a - fit.params.beta1 * t_a;
  fit.monotone = fit.params.beta1 >= 0.0;
  return fit;
}

}  // namespace hybridctl

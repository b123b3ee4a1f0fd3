#pragma once

#include <string>
#include <utility>
#include <variant>

namespace hybridctl {

/// Sufficient statistics of one arm: size, sample mean, sample standard
/// deviation (endpoint units).
struct SummaryStat {
  int n = 0;
  double mean = 0.0;
  double sd = 0.0;

  double variance() const { return sd * sd; }
  /// Squared standard error of the mean.
  double mean_variance() const { return sd * sd / n; }
  void validate(const char* arm = "arm") const;
};

struct HybridData {
  SummaryStat treatment;
  SummaryStat current_control;
  SummaryStat historical_control;

  void validate() const;
};

struct LogisticParams {
  double beta0 = 0.0;
  double beta1 = 0.0;

  void validate() const;
};

/// Printed logistic presets. Stored verbatim rather than refitted from
/// their anchor pairs.
inline constexpr LogisticParams kDbL1{-7.379, 4.472};
inline constexpr LogisticParams kDbL2{-7.374, 3.747};

namespace method {
struct Fixed {
  double a = 0.0;
};
struct DbT {};
struct DbL {
  LogisticParams params;
};
struct Ttp {
  double alpha_h1 = 0.05;
};
struct Eq {
  double delta = 1.5;
  double alpha_h2 = 0.05;
};
}  // namespace method

/// Borrowing rule selecting the historical weight.
using WeightMethod =
    std::variant<method::Fixed, method::DbT, method::DbL, method::Ttp, method::Eq>;

void validate_method(const WeightMethod& m);
bool is_dynamic(const WeightMethod& m);  // DB-T or DB-L
bool is_test_then_pool(const WeightMethod& m);  // TTP or EQ
std::string method_name(const WeightMethod& m);

/// Similarity statistic comparing current and historical controls.
double t1_statistic(const SummaryStat& current, const SummaryStat& historical);

/// Test statistic with the historical arm down-weighted by a in [0, 1].
double pooled_statistic(const HybridData& data, double a);

/// Classical two-sample z of treatment against current control only.
double two_sample_z(const SummaryStat& treatment, const SummaryStat& control);

/// Density-ratio weight f_t(|t1|) / f_t(0) with df = n_c + n_h - 2.
double weight_t(double t1, int df);

/// 1 / (1 + exp(beta0 + beta1 |t1|)).
double weight_logistic(double t1, const LogisticParams& params);

struct LogisticFit {
  LogisticParams params;
  bool monotone = true;  // false when the fitted slope is negative
};

/// Solves beta0 + beta1 t_i = log(1/w_i - 1) for two (t, w) anchors.
LogisticFit fit_logistic_params(std::pair<double, double> anchor1,
                                std::pair<double, double> anchor2);

}  // namespace hybridctl

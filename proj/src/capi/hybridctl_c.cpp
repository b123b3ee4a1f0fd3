#include "hybridctl/hybridctl.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "hybridctl/borrowing.hpp"
#include "hybridctl/dataset.hpp"
#include "hybridctl/decision.hpp"
#include "hybridctl/error.hpp"
#include "hybridctl/inference.hpp"
#include "hybridctl/numerics.hpp"
#include "hybridctl/simlab.hpp"

struct hctl_sim_config {
  hybridctl::SimConfig config;
};

struct hctl_results {
  std::vector<hybridctl::SimResult> results;
};

namespace {

using namespace hybridctl;

thread_local std::string g_last_error;

hctl_status map_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDomain:
      return HCTL_E_INVALID_ARGUMENT;
    case ErrorCode::kDegenerateVariance:
      return HCTL_E_DEGENERATE_VARIANCE;
    case ErrorCode::kBracket:
      return HCTL_E_BRACKET;
    case ErrorCode::kNumericalFailure:
      return HCTL_E_NUMERICAL;
    case ErrorCode::kSingularSystem:
      return HCTL_E_SINGULAR;
    case ErrorCode::kUsage:
      return HCTL_E_USAGE;
    case ErrorCode::kCancelled:
      return HCTL_E_CANCELLED;
  }
  return HCTL_E_INTERNAL;
}

template <class F>
hctl_status guarded(F&& body) {
  g_last_error.clear();
  try {
    body();
    return HCTL_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return map_code(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return HCTL_E_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return HCTL_E_INTERNAL;
  }
}

template <class... Ptrs>
void require_non_null(const Ptrs*... ptrs) {
  if (((ptrs == nullptr) || ...)) fail(ErrorCode::kDomain, "null pointer argument");
}

SummaryStat to_cpp(const hctl_summary& s) { return {s.n, s.mean, s.sd}; }

HybridData to_cpp(const hctl_hybrid_data& d) {
  return {to_cpp(d.treatment), to_cpp(d.control), to_cpp(d.historical)};
}

hctl_summary to_c(const SummaryStat& s) { return {s.n, s.mean, s.sd}; }

hctl_hybrid_data to_c(const HybridData& d) {
  return {to_c(d.treatment), to_c(d.current_control), to_c(d.historical_control)};
}

WeightMethod to_cpp(const hctl_method& m) {
  WeightMethod out;
  switch (m.kind) {
    case HCTL_METHOD_FIXED:
      out = method::Fixed{m.a};
      break;
    case HCTL_METHOD_DB_T:
      out = method::DbT{};
      break;
    case HCTL_METHOD_DB_L:
      out = method::DbL{{m.beta0, m.beta1}};
      break;
    case HCTL_METHOD_TTP:
      out = method::Ttp{m.alpha_h};
      break;
    case HCTL_METHOD_EQ:
      out = method::Eq{m.delta, m.alpha_h};
      break;
    default:
      fail(ErrorCode::kDomain, "unknown method kind");
  }
  validate_method(out);
  return out;
}

hctl_method to_c(const WeightMethod& m) {
  hctl_method out{};
  if (const auto* f = std::get_if<method::Fixed>(&m)) {
    out.kind = HCTL_METHOD_FIXED;
    out.a = f->a;
  } else if (std::holds_alternative<method::DbT>(m)) {
    out.kind = HCTL_METHOD_DB_T;
  } else if (const auto* l = std::get_if<method::DbL>(&m)) {
    out.kind = HCTL_METHOD_DB_L;
    out.beta0 = l->params.beta0;
    out.beta1 = l->params.beta1;
  } else if (const auto* t = std::get_if<method::Ttp>(&m)) {
    out.kind = HCTL_METHOD_TTP;
    out.alpha_h = t->alpha_h1;
  } else if (const auto* e = std::get_if<method::Eq>(&m)) {
    out.kind = HCTL_METHOD_EQ;
    out.alpha_h = e->alpha_h2;
    out.delta = e->delta;
  }
  return out;
}

Sidedness to_cpp(hctl_sidedness s) {
  switch (s) {
    case HCTL_LOWER:
      return Sidedness::kLower;
    case HCTL_UPPER:
      return Sidedness::kUpper;
    case HCTL_TWO_SIDED:
      return Sidedness::kTwoSided;
  }
  fail(ErrorCode::kDomain, "unknown sidedness");
}

DesignParams to_cpp(const hctl_design& d) {
  DesignParams p{d.n_t, d.n_c, d.n_h, d.sigma_t, d.sigma_c, d.sigma_h, d.mu_diff};
  p.validate();
  return p;
}

hctl_outcome to_c(const TestOutcome& o) {
  return {o.weight,
          o.statistic,
          o.critical_value,
          o.p_value,
          o.pooled ? (*o.pooled ? 1 : 0) : -1,
          o.alpha_used,
          o.t1,
          o.reject ? 1 : 0};
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

ExportFormat to_cpp(hctl_format f) {
  switch (f) {
    case HCTL_FORMAT_CSV:
      return ExportFormat::kCsv;
    case HCTL_FORMAT_JSON:
      return ExportFormat::kJson;
  }
  fail(ErrorCode::kUsage, "unsupported export format");
}

}  // namespace

extern "C" {

const char* hctl_version(void) { return "1.0.0"; }

const char* hctl_last_error(void) { return g_last_error.c_str(); }

const char* hctl_status_name(hctl_status status) {
  switch (status) {
    case HCTL_OK:
      return "ok";
    case HCTL_E_INVALID_ARGUMENT:
      return "invalid_argument";
    case HCTL_E_DEGENERATE_VARIANCE:
      return "degenerate_variance";
    case HCTL_E_NUMERICAL:
      return "numerical_failure";
    case HCTL_E_BRACKET:
      return "bracket_error";
    case HCTL_E_SINGULAR:
      return "singular_system";
    case HCTL_E_USAGE:
      return "usage_error";
    case HCTL_E_CANCELLED:
      return "cancelled";
    case HCTL_E_IO:
      return "io_error";
    case HCTL_E_INTERNAL:
      return "internal_error";
  }
  return "unknown";
}

void hctl_string_free(char* s) { delete[] s; }

hctl_status hctl_normal_cdf(double x, double* out) {
  return guarded([&] {
    require_non_null(out);
    if (!std::isfinite(x)) fail(ErrorCode::kDomain, "x must be finite");
    *out = numerics::std_normal_cdf(x);
  });
}

hctl_status hctl_normal_quantile(double p, double* out) {
  return guarded([&] {
    require_non_null(out);
    *out = numerics::std_normal_quantile(p);
  });
}

hctl_status hctl_t_quantile(double p, int32_t df, double* out) {
  return guarded([&] {
    require_non_null(out);
    *out = numerics::t_quantile(p, df);
  });
}

hctl_status hctl_t1_statistic(const hctl_summary* current, const hctl_summary* historical,
                              double* out) {
  return guarded([&] {
    require_non_null(current, historical, out);
    const SummaryStat c = to_cpp(*current);
    const SummaryStat h = to_cpp(*historical);
    c.validate("current control");
    h.validate("historical control");
    *out = t1_statistic(c, h);
  });
}

hctl_status hctl_pooled_statistic(const hctl_hybrid_data* data, double a, double* out) {
  return guarded([&] {
    require_non_null(data, out);
    const HybridData d = to_cpp(*data);
    d.validate();
    *out = pooled_statistic(d, a);
  });
}

hctl_status hctl_weight(const hctl_method* method, const hctl_summary* current,
                        const hctl_summary* historical, double* out) {
  return guarded([&] {
    require_non_null(method, current, historical, out);
    HybridData d;
    d.treatment = to_cpp(*current);  // unused by every weight rule
    d.current_control = to_cpp(*current);
    d.historical_control = to_cpp(*historical);
    d.validate();
    *out = borrowing_weight(to_cpp(*method), d);
  });
}

hctl_status hctl_weight_curve(const hctl_method* method, int32_t n_c, double sd_c,
                              int32_t n_h, double sd_h, const double* t1_grid, size_t count,
                              double* out) {
  return guarded([&] {
    require_non_null(method);
    if (count > 0) require_non_null(t1_grid, out);
    const WeightMethod m = to_cpp(*method);
    const SummaryStat c{n_c, 0.0, sd_c};
    const SummaryStat h{n_h, 0.0, sd_h};
    c.validate("current control");
    h.validate("historical control");
    for (size_t i = 0; i < count; ++i) {
      const double t1 = t1_grid[i];
      if (!std::isfinite(t1)) fail(ErrorCode::kDomain, "t1 grid values must be finite");
      if (const auto* f = std::get_if<method::Fixed>(&m)) {
        out[i] = f->a;
      } else if (std::holds_alternative<method::DbT>(m)) {
        out[i] = weight_t(t1, n_c + n_h - 2);
      } else if (const auto* l = std::get_if<method::DbL>(&m)) {
        out[i] = weight_logistic(t1, l->params);
      } else if (const auto* t = std::get_if<method::Ttp>(&m)) {
        out[i] = ttp_pool_decision(t1, t->alpha_h1) ? 1.0 : 0.0;
      } else if (const auto* e = std::get_if<method::Eq>(&m)) {
        out[i] = eq_pool_decision(t1, c, h, EqConfig{e->delta, e->alpha_h2}) ? 1.0 : 0.0;
      }
    }
  });
}

hctl_status hctl_fit_logistic(double t_a, double w_a, double t_b, double w_b, double* beta0,
                              double* beta1, int32_t* monotone) {
  return guarded([&] {
    require_non_null(beta0, beta1);
    const LogisticFit fit = fit_logistic_params({t_a, w_a}, {t_b, w_b});
    *beta0 = fit.params.beta0;
    *beta1 = fit.params.beta1;
    if (monotone) *monotone = fit.monotone ? 1 : 0;
  });
}

hctl_status hctl_method_preset(const char* label, double delta, hctl_method* out) {
  return guarded([&] {
    require_non_null(label, out);
    const auto preset = standard_method(label, delta);
    if (!preset) fail(ErrorCode::kUsage, std::string("unknown method preset '") + label + "'");
    validate_method(preset->method);
    *out = to_c(preset->method);
  });
}

hctl_status hctl_analyze(const hctl_hybrid_data* data, const hctl_method* method,
                         const hctl_bootstrap_config* bootstrap, const hctl_design* design,
                         double alpha, hctl_sidedness sidedness, hctl_outcome* out) {
  return guarded([&] {
    require_non_null(data, method, out);
    const HybridData d = to_cpp(*data);
    d.validate();
    const WeightMethod m = to_cpp(*method);
    if (is_test_then_pool(m)) {
      const DesignParams p = design ? to_cpp(*design) : DesignParams::from_data(d);
      *out = to_c(ttp_eq_test(d, m, p, alpha, to_cpp(sidedness)));
      return;
    }
    if (bootstrap == nullptr) {
      if (is_dynamic(m)) {
        fail(ErrorCode::kUsage, "dynamic borrowing requires a bootstrap configuration");
      }
      *out = to_c(normal_test(d, std::get<method::Fixed>(m).a, alpha, to_cpp(sidedness)));
      return;
    }
    BootstrapConfig cfg;
    cfg.b_reps = bootstrap->b_reps;
    cfg.seed = bootstrap->seed;
    cfg.mu_hat = bootstrap->mu_hat;
    cfg.sidedness = to_cpp(bootstrap->sidedness);
    cfg.alpha = bootstrap->alpha;
    cfg.workers = bootstrap->workers;
    *out = to_c(bootstrap_test(d, m, cfg));
  });
}

hctl_status hctl_adjust_alpha(const hctl_design* design, const hctl_method* method,
                              double alpha, double* alpha_star, double* residual) {
  return guarded([&] {
    require_non_null(design, method, alpha_star);
    const DesignParams p = to_cpp(*design);
    const WeightMethod m = to_cpp(*method);
    AdjustedAlpha adj;
    if (const auto* t = std::get_if<method::Ttp>(&m)) {
      adj = adjusted_alpha_ttp(p, alpha, t->alpha_h1);
    } else if (const auto* e = std::get_if<method::Eq>(&m)) {
      adj = adjusted_alpha_eq(p, alpha, EqConfig{e->delta, e->alpha_h2});
    } else {
      fail(ErrorCode::kUsage, "alpha adjustment applies to TTP and EQ methods only");
    }
    *alpha_star = adj.alpha_star;
    if (residual) *residual = adj.residual;
  });
}

hctl_status hctl_case_study_data(hctl_hybrid_data* out) {
  return guarded([&] {
    require_non_null(out);
    *out = to_c(case_study_data());
  });
}

hctl_status hctl_summarize_csv(const char* path, hctl_hybrid_data* out) {
  g_last_error.clear();
  if (path == nullptr || out == nullptr) {
    g_last_error = "null pointer argument";
    return HCTL_E_INVALID_ARGUMENT;
  }
  std::ifstream in(path);
  if (!in) {
    g_last_error = std::string("cannot open ") + path;
    return HCTL_E_IO;
  }
  return guarded([&] { *out = to_c(summarize_csv(in)); });
}

size_t hctl_scenario_count(void) { return build_scenario_table().size(); }

hctl_status hctl_scenario_get(int32_t id, hctl_scenario* out) {
  return guarded([&] {
    require_non_null(out);
    const Scenario s = scenario_by_id(id);
    *out = {s.id, s.n_t, s.n_c, s.n_h, s.mu_t, s.mu_c, s.mu_h, s.variance};
  });
}

hctl_status hctl_sim_config_create(hctl_sim_config** out) {
  return guarded([&] {
    require_non_null(out);
    *out = new hctl_sim_config{};
  });
}

void hctl_sim_config_destroy(hctl_sim_config* config) { delete config; }

hctl_status hctl_sim_config_set_n_sims(hctl_sim_config* config, int32_t n_sims) {
  return guarded([&] {
    require_non_null(config);
    if (n_sims < 100) fail(ErrorCode::kDomain, "n_sims must be >= 100");
    config->config.n_sims = n_sims;
  });
}

hctl_status hctl_sim_config_set_b_reps(hctl_sim_config* config, int32_t b_reps) {
  return guarded([&] {
    require_non_null(config);
    if (b_reps < 100) fail(ErrorCode::kDomain, "b_reps must be >= 100");
    config->config.b_reps = b_reps;
  });
}

hctl_status hctl_sim_config_set_seed(hctl_sim_config* config, uint64_t seed) {
  return guarded([&] {
    require_non_null(config);
    config->config.seed = seed;
  });
}

hctl_status hctl_sim_config_set_alpha(hctl_sim_config* config, double alpha,
                                      hctl_sidedness sidedness) {
  return guarded([&] {
    require_non_null(config);
    if (!(alpha > 0.0 && alpha < 0.5)) fail(ErrorCode::kDomain, "alpha must lie in (0, 0.5)");
    config->config.alpha = alpha;
    config->config.sidedness = to_cpp(sidedness);
  });
}

hctl_status hctl_sim_config_set_workers(hctl_sim_config* config, int32_t workers) {
  return guarded([&] {
    require_non_null(config);
    if (workers < 1) fail(ErrorCode::kDomain, "workers must be >= 1");
    config->config.workers = workers;
  });
}

hctl_status hctl_sim_config_clear_methods(hctl_sim_config* config) {
  return guarded([&] {
    require_non_null(config);
    config->config.methods.clear();
  });
}

hctl_status hctl_sim_config_add_method(hctl_sim_config* config, const char* label,
                                       const hctl_method* method) {
  return guarded([&] {
    require_non_null(config, label, method);
    if (*label == '\0') fail(ErrorCode::kDomain, "method label must not be empty");
    config->config.methods.push_back({label, to_cpp(*method)});
  });
}

hctl_status hctl_simulate(const hctl_sim_config* config, const hctl_scenario* scenarios,
                          size_t count, hctl_progress_fn progress, void* user,
                          hctl_results** out) {
  return guarded([&] {
    require_non_null(config, out);
    if (count == 0) fail(ErrorCode::kUsage, "no scenarios selected");
    require_non_null(scenarios);
    const long per_scenario = config->config.n_sims;
    const long total = per_scenario * static_cast<long>(count);
    auto results = std::make_unique<hctl_results>();
    for (size_t i = 0; i < count; ++i) {
      const hctl_scenario& s = scenarios[i];
      const Scenario sc{s.id, s.n_t, s.n_c, s.n_h, s.mu_t, s.mu_c, s.mu_h, s.variance};
      ProgressFn fn;
      if (progress) {
        const long offset = per_scenario * static_cast<long>(i);
        fn = [=](long done, long) { return progress(offset + done, total, user) == 0; };
      }
      results->results.push_back(run_scenario(sc, config->config, fn));
    }
    *out = results.release();
  });
}

void hctl_results_destroy(hctl_results* results) { delete results; }

size_t hctl_results_row_count(const hctl_results* results) {
  if (results == nullptr) return 0;
  size_t rows = 0;
  for (const auto& r : results->results) rows += r.methods.size();
  return rows;
}

hctl_status hctl_results_row(const hctl_results* results, size_t index, hctl_result_row* out) {
  return guarded([&] {
    require_non_null(results, out);
    for (const auto& r : results->results) {
      if (index < r.methods.size()) {
        const MethodResult& m = r.methods[index];
        *out = {r.scenario_id,
                m.method.c_str(),
                m.rejection_rate,
                m.mc_standard_error,
                m.mean_weight,
                m.alpha_star ? *m.alpha_star : std::numeric_limits<double>::quiet_NaN(),
                m.rejections};
        return;
      }
      index -= r.methods.size();
    }
    fail(ErrorCode::kDomain, "result row index out of range");
  });
}

hctl_status hctl_results_export(const hctl_results* results, hctl_format format, char** out) {
  return guarded([&] {
    require_non_null(results, out);
    *out = dup_string(export_results(results->results, to_cpp(format)));
  });
}

hctl_status hctl_results_import(const char* text, hctl_format format, hctl_results** out) {
  return guarded([&] {
    require_non_null(text, out);
    auto results = std::make_unique<hctl_results>();
    results->results = parse_results(text, to_cpp(format));
    *out = results.release();
  });
}

}  // extern "C"

/*
 * hybridctl C API.
 *
 * Every entry point returns an hctl_status. On failure a thread-local
 * message is available from hctl_last_error() until the next call on the
 * same thread. Strings returned through char** must be released with
 * hctl_string_free(); handles with their matching *_destroy function.
 */
#ifndef HYBRIDCTL_H_
#define HYBRIDCTL_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(HYBRIDCTL_BUILDING)
#    define HCTL_API __declspec(dllexport)
#  else
#    define HCTL_API __declspec(dllimport)
#  endif
#else
#  define HCTL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hctl_status {
  HCTL_OK = 0,
  HCTL_E_INVALID_ARGUMENT = 1,   /* domain violation, null pointer */
  HCTL_E_DEGENERATE_VARIANCE = 2,
  HCTL_E_NUMERICAL = 3,          /* solver failure, non-monotone residual */
  HCTL_E_BRACKET = 4,
  HCTL_E_SINGULAR = 5,           /* logistic anchors share a t-value */
  HCTL_E_USAGE = 6,              /* unsupported option or malformed input */
  HCTL_E_CANCELLED = 7,
  HCTL_E_IO = 8,
  HCTL_E_INTERNAL = 9
} hctl_status;

typedef struct hctl_summary {
  int32_t n;
  double mean;
  double sd;
} hctl_summary;

typedef struct hctl_hybrid_data {
  hctl_summary treatment;
  hctl_summary control;     /* current control */
  hctl_summary historical;  /* historical control */
} hctl_hybrid_data;

typedef enum hctl_method_kind {
  HCTL_METHOD_FIXED = 0,  /* uses a */
  HCTL_METHOD_DB_T = 1,
  HCTL_METHOD_DB_L = 2,   /* uses beta0, beta1 */
  HCTL_METHOD_TTP = 3,    /* uses alpha_h */
  HCTL_METHOD_EQ = 4      /* uses delta, alpha_h */
} hctl_method_kind;

typedef struct hctl_method {
  hctl_method_kind kind;
  double a;
  double beta0;
  double beta1;
  double alpha_h;
  double delta;
} hctl_method;

typedef enum hctl_sidedness {
  HCTL_LOWER = 0,
  HCTL_UPPER = 1,
  HCTL_TWO_SIDED = 2
} hctl_sidedness;

typedef struct hctl_bootstrap_config {
  int32_t b_reps;
  uint64_t seed;
  double mu_hat;
  hctl_sidedness sidedness;
  double alpha;
  int32_t workers;
} hctl_bootstrap_config;

typedef struct hctl_design {
  int32_t n_t;
  int32_t n_c;
  int32_t n_h;
  double sigma_t;
  double sigma_c;
  double sigma_h;
  double mu_diff;  /* mu_c - mu_h */
} hctl_design;

typedef struct hctl_outcome {
  double weight;
  double statistic;
  double critical_value;
  double p_value;
  int32_t pooled;  /* 1 / 0 for TTP and EQ, -1 otherwise */
  double alpha_used;
  double t1;
  int32_t reject;
} hctl_outcome;

typedef struct hctl_scenario {
  int32_t id;
  int32_t n_t;
  int32_t n_c;
  int32_t n_h;
  double mu_t;
  double mu_c;
  double mu_h;
  double variance;
} hctl_scenario;

typedef struct hctl_result_row {
  int32_t scenario;
  const char* method;  /* owned by the results handle */
  double rejection_rate;
  double mc_se;
  double mean_weight;
  double alpha_star;   /* NaN when not applicable */
  int64_t rejections;
} hctl_result_row;

typedef enum hctl_format { HCTL_FORMAT_CSV = 0, HCTL_FORMAT_JSON = 1 } hctl_format;

/* Opaque handles. */
typedef struct hctl_sim_config hctl_sim_config;
typedef struct hctl_results hctl_results;

/* Progress callback: return nonzero to cancel the run. */
typedef int (*hctl_progress_fn)(int64_t done, int64_t total, void* user);

HCTL_API const char* hctl_version(void);
HCTL_API const char* hctl_last_error(void);
HCTL_API const char* hctl_status_name(hctl_status status);
HCTL_API void hctl_string_free(char* s);

/* ---- numerics and weights ---- */
HCTL_API hctl_status hctl_normal_cdf(double x, double* out);
HCTL_API hctl_status hctl_normal_quantile(double p, double* out);
HCTL_API hctl_status hctl_t_quantile(double p, int32_t df, double* out);

HCTL_API hctl_status hctl_t1_statistic(const hctl_summary* current,
                                       const hctl_summary* historical, double* out);
HCTL_API hctl_status hctl_pooled_statistic(const hctl_hybrid_data* data, double a,
                                           double* out);
/* Weight the method gives to the historical arm. TTP/EQ return 0 or 1. */
HCTL_API hctl_status hctl_weight(const hctl_method* method, const hctl_summary* current,
                                 const hctl_summary* historical, double* out);
/* Weight curve over a grid of T1 values with control arms (n_c, sd_c) and
 * (n_h, sd_h); writes `count` weights to `out`. */
HCTL_API hctl_status hctl_weight_curve(const hctl_method* method, int32_t n_c, double sd_c,
                                       int32_t n_h, double sd_h, const double* t1_grid,
                                       size_t count, double* out);
HCTL_API hctl_status hctl_fit_logistic(double t_a, double w_a, double t_b, double w_b,
                                       double* beta0, double* beta1, int32_t* monotone);
/* Fills a method struct for a preset label: DB-T, DB-L1, DB-L2, TTP1,
 * TTP2, EQ1, EQ2 (case-insensitive). EQ presets use `delta`. */
HCTL_API hctl_status hctl_method_preset(const char* label, double delta, hctl_method* out);

/* ---- analysis ---- */
/* DB-T / DB-L: parametric bootstrap (bootstrap required).
 * FIXED: bootstrap when `bootstrap` is given, otherwise normal reference
 *        (alpha and sidedness then come from `alpha`, `sidedness`).
 * TTP / EQ: adjusted-alpha z test; `design` may be NULL to use the
 *        observed sizes and sds with zero shift. `alpha` is two-sided. */
HCTL_API hctl_status hctl_analyze(const hctl_hybrid_data* data, const hctl_method* method,
                                  const hctl_bootstrap_config* bootstrap,
                                  const hctl_design* design, double alpha,
                                  hctl_sidedness sidedness, hctl_outcome* out);

/* method must be TTP or EQ; alpha is the two-sided nominal level. */
HCTL_API hctl_status hctl_adjust_alpha(const hctl_design* design, const hctl_method* method,
                                       double alpha, double* alpha_star, double* residual);

HCTL_API hctl_status hctl_case_study_data(hctl_hybrid_data* out);
HCTL_API hctl_status hctl_summarize_csv(const char* path, hctl_hybrid_data* out);

/* ---- scenarios and simulation ---- */
HCTL_API size_t hctl_scenario_count(void);
HCTL_API hctl_status hctl_scenario_get(int32_t id, hctl_scenario* out);

HCTL_API hctl_status hctl_sim_config_create(hctl_sim_config** out);
HCTL_API void hctl_sim_config_destroy(hctl_sim_config* config);
HCTL_API hctl_status hctl_sim_config_set_n_sims(hctl_sim_config* config, int32_t n_sims);
HCTL_API hctl_status hctl_sim_config_set_b_reps(hctl_sim_config* config, int32_t b_reps);
HCTL_API hctl_status hctl_sim_config_set_seed(hctl_sim_config* config, uint64_t seed);
/* alpha is per side for one-sided testing. */
HCTL_API hctl_status hctl_sim_config_set_alpha(hctl_sim_config* config, double alpha,
                                               hctl_sidedness sidedness);
HCTL_API hctl_status hctl_sim_config_set_workers(hctl_sim_config* config, int32_t workers);
/* Drops the default method list; subsequent add_method calls rebuild it. */
HCTL_API hctl_status hctl_sim_config_clear_methods(hctl_sim_config* config);
HCTL_API hctl_status hctl_sim_config_add_method(hctl_sim_config* config, const char* label,
                                                const hctl_method* method);

/* Runs each scenario in order and returns a results handle. The callback
 * (may be NULL) reports replicates completed across all scenarios. */
HCTL_API hctl_status hctl_simulate(const hctl_sim_config* config,
                                   const hctl_scenario* scenarios, size_t count,
                                   hctl_progress_fn progress, void* user,
                                   hctl_results** out);

HCTL_API void hctl_results_destroy(hctl_results* results);
HCTL_API size_t hctl_results_row_count(const hctl_results* results);
HCTL_API hctl_status hctl_results_row(const hctl_results* results, size_t index,
                                      hctl_result_row* out);
HCTL_API hctl_status hctl_results_export(const hctl_results* results, hctl_format format,
                                         char** out);
HCTL_API hctl_status hctl_results_import(const char* text, hctl_format format,
                                         hctl_results** out);

#ifdef __cplusplus
}
#endif

#endif /* HYBRIDCTL_H_ */

/* SPDX-License-Identifier: Apache-2.0 */
#ifndef OPLEARN_OPLEARN_H
#define OPLEARN_OPLEARN_H

/*
 * C interface to the oplearn library: rate theory, Monte Carlo convergence
 * experiments, covariance-decay series and validation suites.
 *
 * Every fallible call returns an opl_status. On failure, opl_last_error()
 * describes the problem; the message is thread local and stays valid until
 * the next failing call on the same thread. Handles are opaque and released
 * with the matching *_free function; strings returned through a handle live
 * as long as the handle.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  define OPL_API __declspec(dllexport)
#else
#  define OPL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum opl_status {
  OPL_OK = 0,
  OPL_INVALID_ARGUMENT = 1,
  OPL_DIMENSION_MISMATCH = 2,
  OPL_NUMERICAL_ERROR = 3,
  OPL_CONFIG_ERROR = 4,
  OPL_IO_ERROR = 5,
  OPL_INTERNAL_ERROR = 99
} opl_status;

OPL_API const char* opl_last_error(void);
/* Line of the last configuration error, 0 if not line specific. */
OPL_API size_t opl_last_error_line(void);
OPL_API const char* opl_version(void);
OPL_API const char* opl_schema_version(void);
OPL_API const char* opl_status_string(opl_status s);

/* ---- theory ----------------------------------------------------------- */

typedef enum opl_log_factor { OPL_LOG_NONE = 0, OPL_LOG_N = 1 } opl_log_factor;
typedef enum opl_dominant { OPL_DOMINANT_VARIANCE = 0, OPL_DOMINANT_BIAS = 1 } opl_dominant;
typedef enum opl_branch {
  OPL_BRANCH_INTERIOR = 0,
  OPL_BRANCH_BOUNDARY = 1,
  OPL_BRANCH_CAPPED = 2
} opl_branch;

typedef struct opl_rate {
  double exponent;
  double variance_exponent;
  double bias_exponent;
  opl_log_factor log_factor;
  opl_dominant dominant_term;
  opl_branch branch;
} opl_rate;

/* truth: "neg_laplacian" | "identity" | "inv_neg_laplacian" (or A, id, A_inv) */
OPL_API opl_status opl_truth_s_star(const char* truth, double* out);
OPL_API opl_status opl_upper_rate(double alpha, double alpha_prime, double p, double s,
                                  opl_rate* out);
OPL_API opl_status opl_colored_rate(double alpha, double alpha_prime, double p, double s,
                                    double beta, opl_rate* out);
OPL_API opl_status opl_excess_risk_rate(double alpha, double p, double s, opl_rate* out);
OPL_API opl_status opl_gap_rate(double alpha, double p, opl_rate* out);
OPL_API opl_status opl_rho_n(double alpha, double alpha_prime, double p, double N, double* out);
OPL_API opl_status opl_j_n(double alpha, double p, double N, size_t* out);
OPL_API opl_status opl_contraction_rate(double alpha, double alpha_prime, double p, double s,
                                        double N, double* out);

/* ---- covariance decay ------------------------------------------------- */

/* theta_j^2 = sum_{k <= K} lambda_k^2 M_jk^2 for each requested j, with
 * lambda_k^2 = 15^(2a - 1) ((k pi)^2 + 225)^(-a). */
OPL_API opl_status opl_covdecay(double alpha_tilde, const size_t* j, size_t count, size_t K,
                                double* values, double* last_terms);

/* OLS of ln(value) on ln(x); slope returned with its standard error. */
OPL_API opl_status opl_loglog_slope(const double* x, const double* value, size_t count,
                                    double* slope, double* slope_stderr);

/* ---- experiments ------------------------------------------------------ */

typedef struct opl_experiment_set opl_experiment_set;
typedef struct opl_report opl_report;

OPL_API opl_status opl_experiments_load(const char* path, opl_experiment_set** out);
OPL_API opl_status opl_experiments_parse(const char* text, opl_experiment_set** out);
OPL_API size_t opl_experiments_count(const opl_experiment_set* set);
OPL_API const char* opl_experiments_name(const opl_experiment_set* set, size_t index);
/* Overrides one key in every experiment of the set (same keys as the file). */
OPL_API opl_status opl_experiments_override(opl_experiment_set* set, const char* key,
                                            const char* value);
OPL_API void opl_experiments_free(opl_experiment_set* set);

OPL_API opl_status opl_run_experiment(const opl_experiment_set* set, size_t index,
                                      unsigned workers, opl_report** out);
OPL_API const char* opl_report_csv(const opl_report* report);
OPL_API const char* opl_report_json(const opl_report* report);

typedef struct opl_fit_summary {
  double fitted_exponent;
  double fit_stderr;
  double intercept;
  double theory_exponent;
  opl_log_factor log_factor;
  int degenerate;
  size_t fit_first_index;
} opl_fit_summary;

typedef struct opl_rate_point {
  size_t N;
  size_t modes;
  double mean_error;
  double stderr_mean;
  double median_error;
  size_t reps;
  double tail_descriptor;
} opl_rate_point;

OPL_API opl_status opl_report_fit(const opl_report* report, opl_fit_summary* out);
OPL_API size_t opl_report_point_count(const opl_report* report);
OPL_API opl_status opl_report_point(const opl_report* report, size_t index, opl_rate_point* out);
OPL_API void opl_report_free(opl_report* report);

/* ---- validation ------------------------------------------------------- */

typedef struct opl_validation opl_validation;

typedef struct opl_check {
  const char* name;
  int passed;
  double observed;
  double expected;
  double tolerance;
  const char* detail;
} opl_check;

OPL_API size_t opl_validation_suite_count(void);
OPL_API const char* opl_validation_suite_name(size_t index);
OPL_API opl_status opl_validate(const char* suite, uint64_t seed, int inject_gap_sign_error,
                                opl_validation** out);
OPL_API int opl_validation_passed(const opl_validation* v);
OPL_API size_t opl_validation_check_count(const opl_validation* v);
OPL_API opl_status opl_validation_check(const opl_validation* v, size_t index, opl_check* out);
OPL_API void opl_validation_free(opl_validation* v);

/* ---- files ------------------------------------------------------------ */

/* Lowercase hex SHA-256 of a file's bytes; out must hold 65 chars. */
OPL_API opl_status opl_sha256_file(const char* path, char* out);

#ifdef __cplusplus
}
#endif

#endif /* OPLEARN_OPLEARN_H */

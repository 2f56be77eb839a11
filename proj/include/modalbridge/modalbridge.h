#ifndef MODALBRIDGE_H
#define MODALBRIDGE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define MB_API __declspec(dllexport)
#else
#define MB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mb_status {
    MB_OK = 0,
    MB_ERR_DOMAIN = 1,
    MB_ERR_SYNTAX = 2,
    MB_ERR_EVALUATION = 3,
    MB_ERR_CONDITIONING = 4,
    MB_ERR_PARAMETER = 5,
    MB_ERR_UNSUPPORTED = 6,
    MB_ERR_CONFIG = 7,
    MB_ERR_INTERNAL = 8
} mb_status;

typedef enum mb_drift_class { MB_DRIFT_TIME_ONLY = 0, MB_DRIFT_LINEAR = 1, MB_DRIFT_GENERAL = 2 } mb_drift_class;

typedef enum mb_estimator_kind { MB_ESTIMATOR_BIN = 0, MB_ESTIMATOR_KDE = 1 } mb_estimator_kind;

typedef struct mb_model mb_model;
typedef struct mb_ensemble mb_ensemble;

/* Message of the last failure on the calling thread; empty after a success. */
MB_API const char* mb_last_error(void);
MB_API const char* mb_status_name(mb_status status);

/* Strings returned through char** outputs are owned by the caller. */
MB_API void mb_string_free(char* s);

MB_API void mb_set_threads(int workers);
/* Test hook: scales kappa_H everywhere. 1.0 restores normal behaviour. */
MB_API void mb_set_kappa_fault(double factor);

/* ---- kernel ---- */
MB_API mb_status mb_kernel(double hurst, double t, double s, double* k_hyp, double* k_alt);
MB_API mb_status mb_kappa(double hurst, double* kappa);

/* ---- drift expressions ---- */
/* On MB_ERR_SYNTAX, *offset (if non-null) receives the byte offset of the failure. */
MB_API mb_status mb_drift_check(const char* source, size_t* offset, char** canonical);
MB_API mb_status mb_drift_eval(const char* source, double t, double x, double y, double* value);

/* ---- model ---- */
/* holder_gamma <= 0 means undeclared. */
MB_API mb_status mb_model_create(double hurst, double rho, double x0, double y0, double T, const char* h1,
                                 const char* h2, double holder_gamma, mb_model** out);
MB_API void mb_model_free(mb_model* model);
MB_API mb_drift_class mb_model_drift_class(const mb_model* model);
MB_API const char* mb_drift_class_name(mb_drift_class c);
/* JSON object: lipschitz_estimate, linear_growth_estimate, contraction_horizon, holder_quotient, violations. */
MB_API mb_status mb_model_assumptions(const mb_model* model, int samples, uint64_t seed, char** json);

/* ---- modal path ---- */
/* Each output array holds n + 1 entries; any output pointer may be null. */
MB_API mb_status mb_modal_path(const mb_model* model, int n, double x, double y, double* t, double* x_path,
                               double* y_path, double* m11, double* m12, double* m21, double* m22);

/* ---- density approximation ---- */
typedef struct mb_density {
    double phi;
    double omega_1;
    double omega_full;
    double alpha;
    double p_hat_leading;
    double p_hat_full;
} mb_density;

MB_API mb_status mb_density_approx(const mb_model* model, double x, double y, int n, mb_density* out);

/* ---- Monte Carlo ---- */
typedef struct mb_sim_config {
    int64_t n_paths;
    int n_steps;
    uint64_t seed;
    mb_estimator_kind estimator;
    double width_x;
    double width_y;
    int chunk_size;
    int keep_paths;
} mb_sim_config;

MB_API void mb_sim_config_default(mb_sim_config* config);

typedef struct mb_estimate {
    double value;
    double std_err;
    int64_t n_effective;
} mb_estimate;

MB_API mb_status mb_simulate(const mb_model* model, const mb_sim_config* config, mb_ensemble** out);
MB_API void mb_ensemble_free(mb_ensemble* ensemble);
MB_API int64_t mb_ensemble_size(const mb_ensemble* ensemble);
/* Copies the terminal values into caller arrays of mb_ensemble_size() entries. */
MB_API mb_status mb_ensemble_terminals(const mb_ensemble* ensemble, double* x, double* y);
MB_API int mb_ensemble_warning_count(const mb_ensemble* ensemble);
MB_API const char* mb_ensemble_warning(const mb_ensemble* ensemble, int index);
MB_API const char* mb_ensemble_fingerprint(const mb_ensemble* ensemble);
MB_API mb_status mb_ensemble_estimate(const mb_ensemble* ensemble, double x, double y, mb_estimator_kind kind,
                                      double width_x, double width_y, mb_estimate* out);

typedef struct mb_bridge_estimate {
    double value;
    double std_err;
    double discretization_bias;
    int64_t n_paths;
} mb_bridge_estimate;

MB_API mb_status mb_bridge_mc(const mb_model* model, double x, double y, const mb_sim_config* config,
                              mb_bridge_estimate* out);

/* ---- acceptance suite ---- */
/* criteria: array of ids in 1..11, or null / count 0 for all. *json receives the report;
   *all_passed is 1 iff every executed criterion passed. */
MB_API mb_status mb_validate(int quick, uint64_t seed, const int* criteria, int count, int* all_passed, char** json);

/* Figure preset: 16 curves ordered by rho in {0, 0.7, -0.7, -0.9}, then H in {0.01, 0.25, 0.49, 0.75}. */
MB_API int mb_figure_curve_count(void);
MB_API mb_status mb_figure_curve(int index, double* hurst, double* rho);
MB_API int mb_figure_steps(void);

#ifdef __cplusplus
}
#endif

#endif

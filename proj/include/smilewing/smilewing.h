#ifndef SMILEWING_H
#define SMILEWING_H

/* C interface to the smilewing library. All handles are opaque; every
 * function returning sw_status records a message retrievable with
 * sw_last_error() on the calling thread. */

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define SW_API __declspec(dllexport)
#else
#define SW_API __attribute__((visibility("default")))
#endif

typedef enum sw_status {
    SW_OK = 0,
    SW_INVALID_ARGUMENT = 1,
    SW_CONFIG_ERROR = 2,
    SW_CONDITION_REFUSED = 3,
    SW_NUMERICAL_FAILURE = 4,
    SW_DOMAIN_ERROR = 5,
    SW_INTERNAL_ERROR = 6
} sw_status;

typedef enum sw_side { SW_RIGHT = 0, SW_LEFT = 1 } sw_side;

typedef struct sw_config sw_config;
typedef struct sw_model sw_model;
typedef struct sw_report sw_report;

/* Message of the last failed call on this thread; "" if none. Valid until the
 * next call on the same thread. */
SW_API const char* sw_last_error(void);
SW_API const char* sw_version(void);
SW_API int sw_config_version(void);

/* Configuration: INI text (NULL or "" for defaults) plus key=value overrides. */
SW_API sw_status sw_config_parse(const char* ini_text, sw_config** out);
SW_API sw_status sw_config_set(sw_config* cfg, const char* assignment);
SW_API void sw_config_free(sw_config* cfg);

/* Runs a subcommand: smile, asymptote, compare, termstructure, regvar, legendre. */
SW_API sw_status sw_run(const char* subcommand, const sw_config* cfg, sw_report** out);
SW_API const char* sw_report_csv(const sw_report* report);
SW_API const char* sw_report_json(const sw_report* report);
/* JSON document without the per-row data. */
SW_API const char* sw_report_summary_json(const sw_report* report);
SW_API void sw_report_free(sw_report* report);

/* Models built from the [model] and [synthetic.*] sections of a config. */
SW_API sw_status sw_model_create(const sw_config* cfg, sw_model** out);
SW_API void sw_model_free(sw_model* model);
/* Writes a NUL-terminated descriptor; *needed receives the full length + 1. */
SW_API sw_status sw_model_describe(const sw_model* model, char* buf, size_t len, size_t* needed);
SW_API sw_status sw_model_log_mgf(const sw_model* model, double z, double* out);
SW_API sw_status sw_model_critical_moments(const sw_model* model, double* p_plus, double* q_minus);
/* log P[X > k] (right) or log P[X <= -k] (left). */
SW_API sw_status sw_model_log_tail(const sw_model* model, double k, sw_side side, double* out);
/* Log of the out-of-the-money price at signed log-strike k, and its total implied vol
 * (NaN below the inversion floor). Either output pointer may be NULL. */
SW_API sw_status sw_model_otm_price(const sw_model* model, double k, double* log_price, double* total_vol);

/* Normalized Black-Scholes and the psi transform. */
SW_API sw_status sw_bs_log_otm_price(double k, double v, double* out);
SW_API sw_status sw_implied_total_vol(double log_price, double k, int is_call, double* out);
SW_API sw_status sw_psi(double x, double* out);
SW_API sw_status sw_psi_inverse(double u, double* out);

#ifdef __cplusplus
}
#endif

#endif

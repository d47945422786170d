#ifndef TWISTNORM_H
#define TWISTNORM_H

/* C interface to the twistnorm library. Every call returns a status code;
 * on failure tn_last_error() holds a message for the calling thread.
 * Strings returned by a handle stay valid until that handle is freed. */

#include <stddef.h>

#if defined(_WIN32)
#define TN_API __declspec(dllexport)
#else
#define TN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tn_status {
  TN_OK = 0,
  TN_PRECISION_MISMATCH = 1,
  TN_NOT_A_UNIT = 2,
  TN_NOT_A_SIMPLE_ROOT = 3,
  TN_DESK_BOUND_EXCEEDED = 4,
  TN_SUPERSINGULAR = 5,
  TN_NON_GALOIS = 6,
  TN_PRECISION_EXHAUSTED = 7,
  TN_SINGULAR_CURVE = 8,
  TN_INVALID_ARGUMENT = 9,
  TN_CONFIG_ERROR = 10,
  TN_IO_ERROR = 11,
  TN_INTERNAL = 99
} tn_status;

typedef struct tn_config tn_config;
typedef struct tn_report tn_report;

TN_API const char* tn_version(void);
TN_API const char* tn_status_name(int status);
TN_API const char* tn_last_error(void);

/* Configuration: flat `key = value` text. */
TN_API int tn_config_parse(const char* text, tn_config** out);
TN_API int tn_config_load(const char* path, tn_config** out);
TN_API int tn_config_set_stability(tn_config* cfg, int on);
/* Echo of the parsed configuration as JSON. */
TN_API const char* tn_config_json(const tn_config* cfg);
TN_API void tn_config_free(tn_config* cfg);

/* Pipelines. */
TN_API int tn_theorem1(const tn_config* cfg, tn_report** out);
TN_API int tn_theorem0(const tn_config* cfg, tn_report** out);
TN_API int tn_probe_norm(const tn_config* cfg, tn_report** out);
TN_API int tn_sweep(unsigned p, unsigned max_n, int stability, unsigned precision, tn_report** out);

/* Reports: JSON lines, one record per check. Canonical output omits timings. */
TN_API size_t tn_report_size(const tn_report* r);
TN_API const char* tn_report_record(const tn_report* r, size_t i, int canonical);
TN_API const char* tn_report_jsonl(const tn_report* r, int canonical);
TN_API const char* tn_report_summary(const tn_report* r);
TN_API int tn_report_all_pass(const tn_report* r);
TN_API int tn_report_write(const tn_report* r, const char* path, int canonical);
TN_API void tn_report_free(tn_report* r);

/* Direct numerical entry points. */
TN_API int tn_unit_root(long long a_q, unsigned long long q, unsigned p, unsigned precision, long long* out_centered);
TN_API int tn_coker_mod_scalar(unsigned p, unsigned precision, long long u, unsigned n, unsigned long long* out_order);
TN_API int tn_curve_count(unsigned p, const long coeffs[5], unsigned long long* order, long long* a_q, int* ordinary);

#ifdef __cplusplus
}
#endif

#endif

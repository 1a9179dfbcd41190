#ifndef SHAPE_SHAPE_H
#define SHAPE_SHAPE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(SHAPE_BUILDING_LIBRARY)
#    define SHAPE_API __declspec(dllexport)
#  else
#    define SHAPE_API __declspec(dllimport)
#  endif
#else
#  define SHAPE_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum shape_status {
  SHAPE_OK = 0,
  SHAPE_ERR_CONFIG = 1,        /* bad key, bad value, or broken constraint */
  SHAPE_ERR_INVALID_INPUT = 2,
  SHAPE_ERR_DIMENSION = 3,
  SHAPE_ERR_PARSE = 4,         /* malformed JSONL line (strict mode) */
  SHAPE_ERR_VALIDATION = 5,    /* records violating field invariants */
  SHAPE_ERR_ORACLE = 6,
  SHAPE_ERR_IO = 7,
  SHAPE_ERR_DIVERGENCE = 8,
  SHAPE_ERR_CHECK_FAILED = 9,  /* a check suite ran and at least one check failed */
  SHAPE_ERR_INTERNAL = 10
} shape_status;

typedef enum shape_estimator {
  SHAPE_ESTIMATOR_SHAPE = 0,
  SHAPE_ESTIMATOR_MRT = 1,
  SHAPE_ESTIMATOR_GRPO = 2
} shape_estimator;

typedef enum shape_oracle {
  SHAPE_ORACLE_LOG = 0,       /* logged boundary potentials only */
  SHAPE_ORACLE_SIMULATOR = 1  /* default chain, uniform policy */
} shape_oracle;

typedef enum shape_report_kind {
  SHAPE_REPORT_REGRESSION = 0,
  SHAPE_REPORT_DISTRIBUTION = 1
} shape_report_kind;

typedef struct shape_config shape_config;
typedef struct shape_records shape_records;

/* Message of the last failed call on this thread; "" after a success. */
SHAPE_API const char* shape_last_error(void);
SHAPE_API const char* shape_status_name(shape_status status);
SHAPE_API const char* shape_version(void);

/* ---- config ---------------------------------------------------------- */

SHAPE_API shape_status shape_config_create(shape_config** out);
SHAPE_API void shape_config_destroy(shape_config* config);
/* Applies one key; keys not given keep their current value. */
SHAPE_API shape_status shape_config_set(shape_config* config, const char* key,
                                        const char* value);
/* Reads a flat key = value file on top of the current values. */
SHAPE_API shape_status shape_config_load(shape_config* config, const char* path);
/* SHAPE_ERR_CONFIG with every violated constraint in shape_last_error(). */
SHAPE_API shape_status shape_config_validate(const shape_config* config);
SHAPE_API shape_status shape_config_get(const shape_config* config, const char* key,
                                        double* out);

/* ---- trajectory logs ------------------------------------------------- */

/* path "-" reads stdin. strict != 0 aborts on the first malformed line. */
SHAPE_API shape_status shape_records_load(const char* path, int strict, shape_records** out);
SHAPE_API void shape_records_destroy(shape_records* records);
SHAPE_API size_t shape_records_count(const shape_records* records);
SHAPE_API size_t shape_records_skipped(const shape_records* records);
/* Line number and message of the i-th skipped line. */
SHAPE_API shape_status shape_records_skipped_at(const shape_records* records, size_t i,
                                                size_t* line, const char** message);

/* ---- file-level operations (out path "-" writes stdout) --------------- */

/* JSONL {id, boundaries} per record. */
SHAPE_API shape_status shape_segment(const shape_records* records, const shape_config* config,
                                     const char* out_path);
/* JSONL advantage sheet per record. */
SHAPE_API shape_status shape_score(const shape_records* records, const shape_config* config,
                                   shape_estimator estimator, shape_oracle oracle,
                                   uint64_t seed, const char* out_path);
/* CSV, one row per (record, estimator). */
SHAPE_API shape_status shape_compare(const shape_records* records, const shape_config* config,
                                     const shape_estimator* estimators, size_t n_estimators,
                                     shape_oracle oracle, uint64_t seed, const char* out_path);

typedef struct shape_simulate_options {
  shape_estimator estimator;
  size_t episodes;
  uint64_t seed;
  double learning_rate;   /* 0 selects the default */
  size_t window;          /* 0 selects the default */
  size_t trace_count;     /* episodes sampled from the trained policy */
  const char* traces_path; /* NULL: no traces */
} shape_simulate_options;

typedef struct shape_simulate_summary {
  double final_success;      /* exact, from the trained policy */
  double final_mean_tokens;
  double last_window_success;
  double last_window_tokens;
  double last_window_drop_rate;
} shape_simulate_summary;

SHAPE_API void shape_simulate_defaults(shape_simulate_options* options);
/* Learning curve CSV. summary may be NULL. */
SHAPE_API shape_status shape_simulate(const shape_config* config,
                                      const shape_simulate_options* options,
                                      const char* out_path, shape_simulate_summary* summary);

typedef struct shape_sandbag_summary {
  double mrt_bonus_monotone;
  double mrt_bonus_dip;
  double shape_bonus_monotone;
  double shape_bonus_dip;
  double shape_bonus_monotone_equal_length;
  double shape_bonus_dip_equal_length;
} shape_sandbag_summary;

/* Per-segment CSV for the monotone and dip paths. summary may be NULL. */
SHAPE_API shape_status shape_sandbag(const shape_config* config, const char* out_path,
                                     shape_sandbag_summary* summary);

typedef void (*shape_check_callback)(const char* name, int passed, const char* detail,
                                     void* user);

/* Runs a suite (consistency, gamma-table, sign, derivatives, all) and calls
   back once per check. SHAPE_ERR_CHECK_FAILED when any check failed. */
SHAPE_API shape_status shape_check(const shape_config* config, const char* suite,
                                   size_t trials, uint64_t seed, shape_check_callback callback,
                                   void* user);

SHAPE_API shape_status shape_report(const shape_records* records, shape_report_kind kind,
                                    size_t stride, const char* out_path);

/* ---- scalar operations ---------------------------------------------- */

SHAPE_API double shape_dynamic_gamma(double length, double l_ref, double gamma_min);
SHAPE_API double shape_shaping_term(double phi_k, double phi_next, double gamma);

/* profile has k + 1 entries, lengths and out have k. */
SHAPE_API shape_status shape_segment_advantages(const shape_config* config,
                                                const double* profile, const size_t* lengths,
                                                size_t k, double outcome, double* out);
/* Clipped entropy weights of one segment (n >= 1). */
SHAPE_API shape_status shape_entropy_weights(const shape_config* config,
                                             const double* entropies, size_t n, double* out);
/* K - 1 cutpoints into out (capacity >= k - 1); count written to n_out. */
SHAPE_API shape_status shape_segment_entropies(const double* entropies, size_t n, double tau,
                                               size_t k, size_t* out, size_t capacity,
                                               size_t* n_out);

#ifdef __cplusplus
}
#endif

#endif

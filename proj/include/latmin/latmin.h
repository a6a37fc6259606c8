/* C interface to the latmin library.
 *
 * Every function returns a latmin_status. On failure the message of the
 * most recent error on the calling thread is available from
 * latmin_last_error(). Strings returned through char** out-parameters are
 * owned by the caller and must be released with latmin_string_free().
 * Options and results are JSON documents. */
#ifndef LATMIN_H
#define LATMIN_H

#include <stddef.h>
#include <stdint.h>

#if defined(LATMIN_BUILDING_LIBRARY)
#define LATMIN_API __attribute__((visibility("default")))
#else
#define LATMIN_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum latmin_status {
  LATMIN_OK = 0,
  LATMIN_ERR_INVALID_ARGUMENT = 1,
  LATMIN_ERR_INVALID_NORM = 2,
  LATMIN_ERR_UNBOUNDED_BALL = 3,
  LATMIN_ERR_DIMENSION_MISMATCH = 4,
  LATMIN_ERR_BUDGET_EXCEEDED = 5,
  LATMIN_ERR_UNDECIDABLE = 6,
  LATMIN_ERR_INFEASIBLE_LEDGER = 7,
  LATMIN_ERR_PRECONDITION = 8,
  LATMIN_ERR_PARSE = 9,
  LATMIN_ERR_SCHEMA = 10,
  LATMIN_ERR_INTERNAL = 11
} latmin_status;

typedef struct latmin_module latmin_module;

LATMIN_API const char* latmin_version(void);
LATMIN_API const char* latmin_status_name(latmin_status status);
LATMIN_API const char* latmin_last_error(void);
LATMIN_API void latmin_string_free(char* s);

/* {"rank": r, "norm": {...}} */
LATMIN_API latmin_status latmin_module_from_json(const char* json, latmin_module** out);
LATMIN_API latmin_status latmin_module_to_json(const latmin_module* m, char** out);
/* Twist by a rational alpha given as "p/q" or a decimal string. */
LATMIN_API latmin_status latmin_module_twist(const latmin_module* m, const char* alpha,
                                             latmin_module** out);
LATMIN_API latmin_status latmin_module_rank(const latmin_module* m, size_t* out);
/* SHA-256 of the canonical module JSON, lowercase hex. */
LATMIN_API latmin_status latmin_module_digest(const latmin_module* m, char** out);
LATMIN_API void latmin_module_free(latmin_module* m);

/* options: {"budget", "threads", "strict", "emit_vectors", "samples",
 * "seed", "force_monte_carlo"}; all optional, NULL means defaults. */
LATMIN_API latmin_status latmin_count(const latmin_module* m, const char* options, char** out);
LATMIN_API latmin_status latmin_minima(const latmin_module* m, const char* options, char** out);
LATMIN_API latmin_status latmin_chi(const latmin_module* m, const char* options, char** out);

/* Runs the inequality suite. *violations receives the number of violated
 * checks. */
LATMIN_API latmin_status latmin_verify(const char* config, uint64_t* violations, char** out);

/* theorem is one of "B", "C", "D", "E", "deg1", "trivial", or NULL to
 * evaluate a ledger document. */
LATMIN_API latmin_status latmin_ledger_eval(const char* config, const char* theorem,
                                            uint64_t* violations, char** out);
LATMIN_API latmin_status latmin_ledger_sweep(unsigned g_max, unsigned kappa_max, unsigned threads,
                                             uint64_t* violations, char** out);
/* params: {"mode", "trials", "g", "kappa", "max_steps", "d_circ_max",
 * "c_max", "slack_max", "final_L2_max"} */
LATMIN_API latmin_status latmin_ledger_simulate(const char* params, uint64_t seed,
                                                uint64_t* violations, char** out);

/* SHA-256 of an arbitrary string, lowercase hex. */
LATMIN_API latmin_status latmin_digest(const char* text, char** out);

#ifdef __cplusplus
}
#endif

#endif

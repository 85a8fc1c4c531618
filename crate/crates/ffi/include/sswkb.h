/* C interface to the singular-potential scattering engine. */

#pragma once

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>
typedef struct SswkbSolver SswkbSolver;

/**
 * Success.
 */
#define SSWKB_OK 0

/**
 * Null pointer argument, unknown selector, or state not yet computed.
 */
#define SSWKB_ERR_NULL -1

/**
 * Spec or parameters rejected.
 */
#define SSWKB_ERR_INVALID_SPEC -2

/**
 * Numerical failure during the solve (details via last_error).
 */
#define SSWKB_ERR_NUMERICS -3

/**
 * Input string was not valid UTF-8.
 */
#define SSWKB_ERR_UTF8 -4

/**
 * Matching radius `R`.
 */
#define SSWKB_FIELD_R 0

/**
 * Strong-core limit weight integral, inner region.
 */
#define SSWKB_FIELD_P_EPS 1

/**
 * Strong-core limit weight integral, outer region.
 */
#define SSWKB_FIELD_P_TAU 2

/**
 * Join constant multiplying the cosine reference.
 */
#define SSWKB_FIELD_C_PLUS 3

/**
 * Join constant multiplying the sine reference.
 */
#define SSWKB_FIELD_S_PLUS 4

/**
 * Far-field phase shift.
 */
#define SSWKB_FIELD_DELTA_L 5

/**
 * Tabulated weight integral, inner region.
 */
#define SSWKB_FIELD_P_EPS_EXACT 6

/**
 * Tabulated weight integral, outer region.
 */
#define SSWKB_FIELD_P_TAU_EXACT 7

/**
 * Outer edge of the tabulated range.
 */
#define SSWKB_FIELD_T_MAX 8

/**
 * Verdict values returned by `sswkb_solver_verdict`.
 */
#define SSWKB_VERDICT_CONVERGED 0

#define SSWKB_VERDICT_NOT_ESTABLISHED 1

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Create a solver from a JSON potential spec (same schema as the CLI
 * `--spec`), wavenumber and angular momentum. Returns null when the spec
 * fails to parse or validate.
 *
 * # Safety
 * `spec_json` must be a valid NUL-terminated string or null.
 */
SswkbSolver *sswkb_solver_new(const char *spec_json, double k, uint32_t l);

/**
 * Set the truncation orders of the inner and outer chains (defaults 4, 4).
 * Clears any previously computed result.
 *
 * # Safety
 * `h` must be a live handle from `sswkb_solver_new` or null.
 */
int sswkb_solver_set_orders(SswkbSolver *h, uint32_t n, uint32_t m);

/**
 * Run the solve. Returns `SSWKB_OK` and stores the result on the handle, or
 * a negative code with the message available via `sswkb_solver_last_error`.
 *
 * # Safety
 * `h` must be a live handle from `sswkb_solver_new` or null.
 */
int sswkb_solver_run(SswkbSolver *h);

/**
 * Read one scalar result field (see the `SSWKB_FIELD_*` selectors) into
 * `*out`. Requires a successful `sswkb_solver_run` first.
 *
 * # Safety
 * `h` must be a live handle or null; `out` must point to a writable f64 or
 * be null.
 */
int sswkb_solver_get(const SswkbSolver *h, int field, double *out);

/**
 * Convergence verdict of the last run: `SSWKB_VERDICT_CONVERGED` or
 * `SSWKB_VERDICT_NOT_ESTABLISHED`; negative without a result.
 *
 * # Safety
 * `h` must be a live handle or null.
 */
int sswkb_solver_verdict(const SswkbSolver *h);

/**
 * Serialize the run summary (same schema as the CLI) into `buf`. Returns the
 * JSON length in bytes excluding the NUL, truncating the copy to `cap`;
 * query with `(NULL, 0)` first to size the buffer. Negative without a
 * result.
 *
 * # Safety
 * `h` must be a live handle or null; `buf` must point to `cap` writable
 * bytes or be null.
 */
intptr_t sswkb_solver_summary_json(const SswkbSolver *h, char *buf, uintptr_t cap);

/**
 * Copy the message of the last failed run into `buf` (same buffer contract
 * as `sswkb_solver_summary_json`). Returns 0 when there is no pending error.
 *
 * # Safety
 * `h` must be a live handle or null; `buf` must point to `cap` writable
 * bytes or be null.
 */
intptr_t sswkb_solver_last_error(const SswkbSolver *h, char *buf, uintptr_t cap);

/**
 * Destroy a handle. Null is a no-op; anything else must come from
 * `sswkb_solver_new` and not be used afterwards.
 *
 * # Safety
 * See above.
 */
void sswkb_solver_free(SswkbSolver *h);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

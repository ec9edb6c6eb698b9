#ifndef WITTSCAFFOLD_H
#define WITTSCAFFOLD_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes; 2, 3 and 4 agree with the command-line exit codes.
 */
typedef enum WsErrorCode {
  WS_ERROR_CODE_OK = 0,
  WS_ERROR_CODE_INVALID_ARGUMENT = 1,
  WS_ERROR_CODE_VALIDATION = 2,
  WS_ERROR_CODE_INVARIANT = 3,
  WS_ERROR_CODE_PRECISION_EXHAUSTED = 4,
  WS_ERROR_CODE_PANIC = 5,
} WsErrorCode;

/**
 * Opaque handle to a finished analysis.
 */
typedef struct WsAnalysis WsAnalysis;

/**
 * Input parameters: `a1 = a1_coeff·π0^a1_exp`, `μ = mu_coeff·π0^mu_exp`,
 * `π0^e0 = p·unit`. A `precision` of zero or less selects the default target.
 */
typedef struct WsParams {
  uint32_t p;
  uint32_t e0;
  int64_t a1_coeff;
  int64_t a1_exp;
  int64_t mu_coeff;
  int64_t mu_exp;
  int64_t unit;
  int64_t precision;
} WsParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parameters of the worked example (`p = 3`, `e0 = 6`, `a1 = μ = π0^-1`).
 */
struct WsParams ws_reference_params(void);

/**
 * Checks the parameter choices and the freeness bound.
 * Returns `WS_ERROR_CODE_VALIDATION` with the violations as the last error if they fail.
 *
 * # Safety
 * `params` must be NULL or point to a valid `WsParams`.
 */
enum WsErrorCode ws_validate(const struct WsParams *params);

/**
 * Runs the full analysis and stores a new handle in `*out`.
 *
 * # Safety
 * `params` must be NULL or point to a valid `WsParams`; `out` must be NULL or writable.
 */
enum WsErrorCode ws_analyze(const struct WsParams *params, struct WsAnalysis **out);

/**
 * Releases a handle from [`ws_analyze`]; NULL is ignored.
 *
 * # Safety
 * `handle` must come from `ws_analyze` and not have been freed.
 */
void ws_analysis_free(struct WsAnalysis *handle);

/**
 * Lower ramification breaks `b1`, `b2`.
 *
 * # Safety
 * `handle` must be a live handle; the output pointers must be NULL or writable.
 */
enum WsErrorCode ws_analysis_breaks(const struct WsAnalysis *handle, int64_t *b1, int64_t *b2);

/**
 * Whether the valuation ring is free over its associated order.
 *
 * # Safety
 * `handle` must be a live handle; `free` must be writable.
 */
enum WsErrorCode ws_analysis_is_free(const struct WsAnalysis *handle, bool *free);

/**
 * Copies the `d` table into `buf` (capacity `cap`) and writes its length to `len`.
 * With a short buffer nothing is copied and `len` still reports the size needed.
 *
 * # Safety
 * `handle` must be live, `len` writable, and `buf` valid for `cap` elements (or NULL with `cap == 0`).
 */
enum WsErrorCode ws_analysis_d_table(const struct WsAnalysis *handle,
                                     int64_t *buf,
                                     size_t cap,
                                     size_t *len);

/**
 * The full report as JSON, or NULL on a NULL handle. Free with [`ws_string_free`].
 *
 * # Safety
 * `handle` must be NULL or a live handle.
 */
char *ws_analysis_json(const struct WsAnalysis *handle);

/**
 * Runs the audit suites and stores the JSON report in `*out_json`.
 * Returns `WS_ERROR_CODE_INVARIANT` on a definite failure and
 * `WS_ERROR_CODE_PRECISION_EXHAUSTED` when every failure is indeterminate; the
 * report is produced in both cases.
 *
 * # Safety
 * `params` must be NULL or valid; `out_json` must be NULL or writable.
 */
enum WsErrorCode ws_audit(const struct WsParams *params,
                          size_t sample,
                          uint64_t seed,
                          char **out_json);

/**
 * Message of the most recent failure on this thread, or NULL. Free with [`ws_string_free`].
 */
char *ws_last_error_message(void);

/**
 * Releases a string returned by this library; NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void ws_string_free(char *s);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* WITTSCAFFOLD_H */

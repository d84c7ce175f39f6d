#ifndef WALSH_GREEDY_H
#define WALSH_GREEDY_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum WgStatus {
  WG_STATUS_OK = 0,
  WG_STATUS_NULL_POINTER = 1,
  WG_STATUS_INVALID_ARGUMENT = 2,
  WG_STATUS_RESOURCE = 3,
  WG_STATUS_PARSE = 4,
  WG_STATUS_NEEDS_EXACT_EVALUATION = 5,
  WG_STATUS_INVALID_UTF8 = 6,
  WG_STATUS_PANIC = 7,
} WgStatus;

/**
 * Opaque finite Walsh expansion.
 */
typedef struct WgExpansion WgExpansion;

/**
 * Opaque verification report.
 */
typedef struct WgReport WgReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *wg_last_error_message(void);

/**
 * # Safety
 * `s` must come from this library and not have been freed already.
 */
void wg_string_free(char *s);

/**
 * Sets the grid memory guard and returns the previous value.
 */
uint32_t wg_set_level_cap(uint32_t cap);

/**
 * `||D_m||_1` as an exact `p/q` string.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage.
 */
enum WgStatus wg_lebesgue_constant(uint64_t m, char **out);

/**
 * `||D_m||_1` rounded to the nearest double.
 */
double wg_lebesgue_constant_f64(uint64_t m);

/**
 * Maximizer of `||D_m||_1` over `2^{k-1} <= m < 2^k`.
 *
 * # Safety
 * `out_m` and `out_value` must be valid pointers to writable storage.
 */
enum WgStatus wg_block_max_search(uint32_t k, uint64_t *out_m, char **out_value);

/**
 * Builds the construction with `blocks` blocks and certifies it.
 * `level_cap == 0` uses the current memory guard.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage.
 */
enum WgStatus wg_verify(uint32_t blocks, uint32_t level_cap_override, struct WgReport **out);

/**
 * # Safety
 * `report` must come from [`wg_verify`] and not have been freed already.
 */
void wg_report_free(struct WgReport *report);

/**
 * Whether every certificate in the report holds. False for null.
 *
 * # Safety
 * `report` must be null or a live handle.
 */
bool wg_report_all_passed(const struct WgReport *report);

/**
 * Number of per-block records (blocks 2..=V).
 *
 * # Safety
 * `report` must be null or a live handle.
 */
size_t wg_report_record_count(const struct WgReport *report);

/**
 * Block index, `m_nu`, certified gap lower bound (as a double) and pass flag
 * of record `i`.
 *
 * # Safety
 * `report` must be a live handle; all out-pointers must be writable.
 */
enum WgStatus wg_report_record(const struct WgReport *report,
                               size_t i,
                               uint64_t *out_nu,
                               uint64_t *out_m_nu,
                               double *out_gap_lower,
                               bool *out_passed);

/**
 * Exact gap lower bound of record `i` as a `p/q` string.
 *
 * # Safety
 * `report` must be a live handle; `out` must be writable.
 */
enum WgStatus wg_report_gap_lower_exact(const struct WgReport *report, size_t i, char **out);

/**
 * The report in the same JSON form the CLI `verify` command writes.
 *
 * # Safety
 * `report` must be a live handle; `out` must be writable.
 */
enum WgStatus wg_report_to_json(const struct WgReport *report, char **out);

/**
 * Parses the `index<TAB>coeff` expansion format.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum WgStatus wg_expansion_parse(const char *text, struct WgExpansion **out);

/**
 * # Safety
 * `e` must come from [`wg_expansion_parse`] and not have been freed already.
 */
void wg_expansion_free(struct WgExpansion *e);

/**
 * # Safety
 * `e` must be null or a live handle.
 */
size_t wg_expansion_len(const struct WgExpansion *e);

/**
 * `||G_{m2} - G_{m1}||_1` on a level-`level` grid, as exact strings: the
 * computed value and the dropped-tail remainder bounding its error.
 *
 * # Safety
 * `e` must be a live handle; both out-pointers must be writable.
 */
enum WgStatus wg_expansion_gap_norm(const struct WgExpansion *e,
                                    size_t m1,
                                    size_t m2,
                                    uint32_t level,
                                    char **out_value,
                                    char **out_remainder);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WALSH_GREEDY_H */

#ifndef RECTCOVER_H
#define RECTCOVER_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum RcStatus {
  RC_STATUS_OK = 0,
  RC_STATUS_NULL_POINTER = 1,
  RC_STATUS_INVALID_ARGUMENT = 2,
  RC_STATUS_OUT_OF_RANGE = 3,
  /**
   * A structural or cover check failed.
   */
  RC_STATUS_VERIFICATION_FAILED = 4,
  /**
   * A size guard refused the request.
   */
  RC_STATUS_GUARD_EXCEEDED = 5,
  RC_STATUS_PARSE = 6,
  RC_STATUS_IO = 7,
  /**
   * Panic or other unexpected failure inside the library.
   */
  RC_STATUS_INTERNAL = 8,
} RcStatus;

/**
 * Prime selection strategy for [`rc_cover_generate`].
 */
typedef enum RcMode {
  RC_MODE_ADAPTIVE = 0,
  RC_MODE_PAPER = 1,
} RcMode;

/**
 * Residue rectangle cover of an instance.
 */
typedef struct RcCover RcCover;

/**
 * Point-line incidence instance.
 */
typedef struct RcInstance RcInstance;

/**
 * Bit-packed boolean matrix.
 */
typedef struct RcMatrix RcMatrix;

/**
 * Limits for [`rc_exact_min_cover`] and [`rc_stats_json`].
 */
typedef struct RcLimits {
  size_t max_entries;
  size_t max_ones;
  size_t max_candidates;
  size_t greedy_cap;
} RcLimits;

/**
 * Summary written by [`rc_cover_verify`].
 */
typedef struct RcCoverCheck {
  /**
   * The prime product exceeds the largest possible gap.
   */
  bool sufficient;
  bool monochromatic;
  bool covered;
  bool crt;
  /**
   * One-entries left uncovered.
   */
  size_t defects;
} RcCoverCheck;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer is
 * valid until the next library call on the same thread.
 */
const char *rc_last_error(void);

/**
 * Free a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void rc_string_free(char *s);

/**
 * `rows x cols` matrix of zeros.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum RcStatus rc_matrix_new(size_t rows, size_t cols, struct RcMatrix **out);

/**
 * Parse a plain (`P1`) PBM image. Black pixels are ones.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` valid for writes.
 */
enum RcStatus rc_matrix_from_pbm(const char *text, struct RcMatrix **out);

/**
 * Render as plain PBM. Free the result with [`rc_string_free`].
 *
 * # Safety
 * `m` must be a live handle and `out` valid for writes.
 */
enum RcStatus rc_matrix_to_pbm(const struct RcMatrix *m, char **out);

/**
 * # Safety
 * `m` must be null or a live handle; it is invalid afterwards.
 */
void rc_matrix_free(struct RcMatrix *m);

/**
 * Row count, or 0 for null.
 *
 * # Safety
 * `m` must be null or a live handle.
 */
size_t rc_matrix_rows(const struct RcMatrix *m);

/**
 * Column count, or 0 for null.
 *
 * # Safety
 * `m` must be null or a live handle.
 */
size_t rc_matrix_cols(const struct RcMatrix *m);

/**
 * # Safety
 * `m` must be a live handle and `out` valid for writes.
 */
enum RcStatus rc_matrix_get(const struct RcMatrix *m, size_t row, size_t col, bool *out);

/**
 * # Safety
 * `m` must be a live handle.
 */
enum RcStatus rc_matrix_set(struct RcMatrix *m, size_t row, size_t col, bool value);

/**
 * # Safety
 * `m` must be a live handle and `out` valid for writes.
 */
enum RcStatus rc_matrix_count_zeros(const struct RcMatrix *m, size_t *out);

/**
 * Search for a 2x2 all-zero submatrix. On a hit `*found` is true and
 * `block` receives `{row1, row2, col1, col2}`; otherwise `block` is left
 * untouched.
 *
 * # Safety
 * `m` must be a live handle, `found` valid for writes and `block` valid for
 * four writes.
 */
enum RcStatus rc_matrix_find_zero_2x2(const struct RcMatrix *m, bool *found, size_t *block);

/**
 * Statistics as JSON with keys `ones`, `zeros`, `d`, `explicit`, `greedy`,
 * `exact`, `optimal`, `lower`. `limits` may be null for the defaults.
 *
 * # Safety
 * `m` must be a live handle, `limits` null or valid, `out` valid for writes.
 */
enum RcStatus rc_stats_json(const struct RcMatrix *m, const struct RcLimits *limits, char **out);

/**
 * Size of a minimum rectangle cover and whether it is proven optimal.
 * Returns [`RcStatus::GuardExceeded`] when the matrix is too large for the
 * exact solver. `limits` may be null for the defaults.
 *
 * # Safety
 * `m` must be a live handle, `limits` null or valid, the outputs valid for
 * writes.
 */
enum RcStatus rc_exact_min_cover(const struct RcMatrix *m,
                                 const struct RcLimits *limits,
                                 size_t *size,
                                 bool *optimal);

/**
 * Default solver limits.
 */
struct RcLimits rc_limits_default(void);

/**
 * `2m^4 - (m(m+1)/2)^2`, the number of zeros the instance for `m` has.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum RcStatus rc_exact_zero_count(uint64_t m, uint64_t *out);

/**
 * Build the incidence instance for `m`. `max_m` of 0 means the library
 * default.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum RcStatus rc_instance_build(uint64_t m, uint64_t max_m, struct RcInstance **out);

/**
 * # Safety
 * `inst` must be null or a live handle; it is invalid afterwards.
 */
void rc_instance_free(struct RcInstance *inst);

/**
 * Side length `n = 2m^3`, or 0 for null.
 *
 * # Safety
 * `inst` must be null or a live handle.
 */
size_t rc_instance_n(const struct RcInstance *inst);

/**
 * Copy of the instance matrix as a new handle owned by the caller.
 *
 * # Safety
 * `inst` must be a live handle and `out` valid for writes.
 */
enum RcStatus rc_instance_matrix(const struct RcInstance *inst, struct RcMatrix **out);

/**
 * Check for a 2x2 all-zero block, both by scanning and against the line
 * geometry. A block gives [`RcStatus::VerificationFailed`].
 *
 * # Safety
 * `inst` must be a live handle.
 */
enum RcStatus rc_instance_verify(const struct RcInstance *inst);

/**
 * Every residue slot for the chosen primes, empty ones included.
 *
 * # Safety
 * `inst` must be a live handle and `out` valid for writes.
 */
enum RcStatus rc_cover_generate(const struct RcInstance *inst,
                                enum RcMode mode,
                                struct RcCover **out);

/**
 * # Safety
 * `cover` must be null or a live handle; it is invalid afterwards.
 */
void rc_cover_free(struct RcCover *cover);

/**
 * Number of rectangles, or 0 for null.
 *
 * # Safety
 * `cover` must be null or a live handle.
 */
size_t rc_cover_len(const struct RcCover *cover);

/**
 * Non-empty rectangles, or 0 for null.
 *
 * # Safety
 * `cover` must be null or a live handle.
 */
size_t rc_cover_nonempty(const struct RcCover *cover);

/**
 * Check the cover against its instance. A failing check under a
 * sufficient prime plan returns [`RcStatus::VerificationFailed`]; under an
 * insufficient plan the call succeeds and `out` records what failed.
 *
 * # Safety
 * Both handles must be live and `out` valid for writes.
 */
enum RcStatus rc_cover_verify(const struct RcInstance *inst,
                              const struct RcCover *cover,
                              struct RcCoverCheck *out);

/**
 * Drop empty and redundant rectangles into a new handle.
 *
 * # Safety
 * Both handles must be live and `out` valid for writes.
 */
enum RcStatus rc_cover_prune(const struct RcInstance *inst,
                             const struct RcCover *cover,
                             struct RcCover **out);

/**
 * Cover as JSON. Free the result with [`rc_string_free`].
 *
 * # Safety
 * `cover` must be a live handle and `out` valid for writes.
 */
enum RcStatus rc_cover_to_json(const struct RcCover *cover, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RECTCOVER_H */

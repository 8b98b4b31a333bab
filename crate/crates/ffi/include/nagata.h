#ifndef NAGATA_H
#define NAGATA_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Relative tolerance used when callers pass a negative value.
 */
#define NAGATA_DEFAULT_REL_TOL 1e-9

typedef enum NagataStatus {
  NAGATA_STATUS_OK = 0,
  NAGATA_STATUS_NULL_POINTER = 1,
  NAGATA_STATUS_INVALID_ARGUMENT = 2,
  NAGATA_STATUS_INVALID_SPACE = 3,
  NAGATA_STATUS_INVALID_MAP = 4,
  NAGATA_STATUS_PARSE = 5,
  NAGATA_STATUS_LIMIT_EXCEEDED = 6,
  NAGATA_STATUS_NOT_FOUND = 7,
  NAGATA_STATUS_INTERNAL = 99,
} NagataStatus;

/**
 * Opaque map between two finite metric spaces.
 */
typedef struct NagataMap NagataMap;

/**
 * Opaque validated finite metric space.
 */
typedef struct NagataSpace NagataSpace;

/**
 * Summary of a Nagata check at one scale.
 */
typedef struct NagataCheckResult {
  bool violation;
  /**
   * Center of the witness; meaningful only when `violation` is set.
   */
  size_t center;
  double margin;
} NagataCheckResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failing call on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *nagata_last_error(void);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library and not yet freed.
 */
void nagata_string_free(char *s);

/**
 * Builds a space from a row-major `n x n` distance matrix. A negative
 * `rel_tol` selects [`NAGATA_DEFAULT_REL_TOL`].
 *
 * # Safety
 * `matrix` must point to `n * n` readable doubles and `out` must be writable.
 */
enum NagataStatus nagata_space_from_matrix(const double *matrix,
                                           size_t n,
                                           double rel_tol,
                                           struct NagataSpace **out);

/**
 * Builds a space from its JSON file form (`{"matrix": ...}` or
 * `{"points": ..., "metric": "l1" | "l2" | "linf"}`).
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` must be writable.
 */
enum NagataStatus nagata_space_from_json(const char *json,
                                         double rel_tol,
                                         struct NagataSpace **out);

/**
 * # Safety
 * `space` must be NULL or a handle from this library not yet freed.
 */
void nagata_space_free(struct NagataSpace *space);

/**
 * # Safety
 * `space` must be a live handle.
 */
size_t nagata_space_len(const struct NagataSpace *space);

/**
 * # Safety
 * `space` must be a live handle and `out` writable.
 */
enum NagataStatus nagata_space_distance(const struct NagataSpace *space,
                                        size_t i,
                                        size_t j,
                                        double *out);

/**
 * # Safety
 * `space` must be a live handle and `out` writable.
 */
enum NagataStatus nagata_space_is_ultrametric(const struct NagataSpace *space, bool *out);

/**
 * Full-precision JSON form of the space; free with [`nagata_string_free`].
 *
 * # Safety
 * `space` must be a live handle and `out` writable.
 */
enum NagataStatus nagata_space_to_json(const struct NagataSpace *space, char **out);

/**
 * Nagata check for `n` at scale `r`.
 *
 * # Safety
 * `space` must be a live handle and `out` writable.
 */
enum NagataStatus nagata_check_scale(const struct NagataSpace *space,
                                     size_t n,
                                     double r,
                                     struct NagataCheckResult *out);

/**
 * The full check report as JSON; free with [`nagata_string_free`].
 *
 * # Safety
 * `space` must be a live handle and `out` writable.
 */
enum NagataStatus nagata_check_json(const struct NagataSpace *space,
                                    size_t n,
                                    double r,
                                    char **out);

/**
 * Smallest `m` such that `m + 1` parts with `K r`-bounded `r`-components
 * exist, by exhaustive search (at most 14 points and 4 parts).
 *
 * # Safety
 * `space` must be a live handle and `out` writable.
 */
enum NagataStatus nagata_min_parts_exact(const struct NagataSpace *space,
                                         double r,
                                         double k,
                                         size_t *out);

/**
 * Number of parts used by the first-fit decomposer.
 *
 * # Safety
 * `space` must be a live handle and `out` writable.
 */
enum NagataStatus nagata_greedy_part_count(const struct NagataSpace *space,
                                           double r,
                                           double k,
                                           size_t *out);

/**
 * Builds a map; both spaces are copied, so the caller keeps ownership.
 *
 * # Safety
 * `domain` and `codomain` must be live handles, `assignment` must point to
 * `len` readable values and `out` must be writable.
 */
enum NagataStatus nagata_map_new(const struct NagataSpace *domain,
                                 const struct NagataSpace *codomain,
                                 const size_t *assignment,
                                 size_t len,
                                 struct NagataMap **out);

/**
 * Builds a map from its JSON file form (`domain`, `codomain`, `assignment`).
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` must be writable.
 */
enum NagataStatus nagata_map_from_json(const char *json, double rel_tol, struct NagataMap **out);

/**
 * # Safety
 * `map` must be NULL or a handle from this library not yet freed.
 */
void nagata_map_free(struct NagataMap *map);

/**
 * # Safety
 * `map` must be a live handle and `out` writable.
 */
enum NagataStatus nagata_map_lipschitz(const struct NagataMap *map, double *out);

/**
 * # Safety
 * `map` must be a live handle and `out` writable.
 */
enum NagataStatus nagata_map_openness(const struct NagataMap *map, double *out);

/**
 * Whether the fiber space sits between `d_Y / lambda` and `mu d_Y` under
 * the Hausdorff distance.
 *
 * # Safety
 * `map` must be a live handle and `out` writable.
 */
enum NagataStatus nagata_map_fiber_space_check(const struct NagataMap *map, bool *out);

/**
 * Ball-image criterion with constant `mu` over the default radius grid.
 *
 * # Safety
 * `map` must be a live handle and `out` writable.
 */
enum NagataStatus nagata_map_brodskiy(const struct NagataMap *map, double mu, bool *out);

/**
 * `12 + 6 sqrt 2`.
 */
double nagata_word_constant(void);

/**
 * The explicit `{a, b}`-word for `c^k` over the letters `a A b B`
 * (capitals are inverses); free with [`nagata_string_free`].
 *
 * # Safety
 * `out` must be writable.
 */
enum NagataStatus nagata_claim1_word(int64_t k, char **out);

/**
 * Length of the explicit word for `c^k`.
 *
 * # Safety
 * `out` must be writable.
 */
enum NagataStatus nagata_claim1_length(int64_t k, size_t *out);

/**
 * Exact `{a, b}` word length of `c^k` by breadth-first search to `radius`;
 * [`NagataStatus::NotFound`] when `c^k` lies outside the ball.
 *
 * # Safety
 * `out` must be writable.
 */
enum NagataStatus nagata_central_word_length(int64_t k, uint32_t radius, uint32_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NAGATA_H */

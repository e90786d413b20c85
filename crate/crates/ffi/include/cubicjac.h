#ifndef CUBICJAC_H
#define CUBICJAC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. Values 1 to 5 match the command-line exit codes.
 */
typedef enum CjStatus {
  CJ_STATUS_OK = 0,
  CJ_STATUS_IO = 1,
  CJ_STATUS_PARSE = 2,
  CJ_STATUS_HYPOTHESIS = 3,
  CJ_STATUS_THEOREM_VIOLATION = 4,
  CJ_STATUS_RESOURCE_CAP = 5,
  CJ_STATUS_NULL_POINTER = 6,
  CJ_STATUS_INVALID_UTF8 = 7,
  CJ_STATUS_PANIC = 8,
} CjStatus;

/**
 * A polynomial map together with its coefficient field.
 */
typedef struct CjMap CjMap;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parse map text. `field` may be null to use the text's own header (or Q).
 *
 * # Safety
 * `text` and `field` (when non-null) must be nul-terminated strings and
 * `out` must be writable.
 */
enum CjStatus cj_map_parse(const char *text, const char *field, struct CjMap **out);

/**
 * Release a map. Null is ignored.
 *
 * # Safety
 * `map` must come from this library and not be used afterwards.
 */
void cj_map_free(struct CjMap *map);

/**
 * Write the map in the text format accepted by `cj_map_parse`.
 *
 * # Safety
 * `map` must be a live handle and `out` writable.
 */
enum CjStatus cj_map_to_text(const struct CjMap *map, char **out);

/**
 * Release a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void cj_string_free(char *s);

/**
 * Rank of the Jacobian matrix of `H` over the rational function field.
 *
 * # Safety
 * `map` must be a live handle and `out` writable.
 */
enum CjStatus cj_jacobian_rank(const struct CjMap *map, size_t *out);

/**
 * Whether `F = x + H` has constant nonzero Jacobian determinant.
 *
 * # Safety
 * `map` must be a live handle and `out` writable.
 */
enum CjStatus cj_is_keller(const struct CjMap *map, bool *out);

/**
 * Classification report for a cubic map of Jacobian rank at most two, as
 * JSON.
 *
 * # Safety
 * `map` must be a live handle and `out` writable.
 */
enum CjStatus cj_classify(const struct CjMap *map, char **out);

/**
 * Keller normal form report, as JSON.
 *
 * # Safety
 * `map` must be a live handle and `out` writable.
 */
enum CjStatus cj_keller_normal_form(const struct CjMap *map, char **out);

/**
 * Inverse of the Keller map `F = x + H`. A `degree_bound` of 0 selects
 * `(deg F)^(n-1)`.
 *
 * # Safety
 * `map` must be a live handle and `out` writable.
 */
enum CjStatus cj_invert(const struct CjMap *map, uint32_t degree_bound, struct CjMap **out);

/**
 * Elementary decomposition of `F = x + H`, as JSON.
 *
 * # Safety
 * `map` must be a live handle and `out` writable.
 */
enum CjStatus cj_tame_decompose(const struct CjMap *map, bool allow_extra_variable, char **out);

/**
 * The full map `f(g(x))`.
 *
 * # Safety
 * `f` and `g` must be live handles and `out` writable.
 */
enum CjStatus cj_compose(const struct CjMap *f, const struct CjMap *g, struct CjMap **out);

/**
 * Message for the last failed call on this thread, or an empty string. The
 * pointer stays valid until the next call on the same thread.
 */
const char *cj_last_error(void);

/**
 * Library version as a static string.
 */
const char *cj_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CUBICJAC_H */

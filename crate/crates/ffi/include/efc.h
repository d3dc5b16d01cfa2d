#ifndef EFC_H
#define EFC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Three-valued closure decision.
 */
typedef enum EfcDecision {
  EFC_DECISION_FALSE = 0,
  EFC_DECISION_TRUE = 1,
  EFC_DECISION_UNKNOWN = 2,
} EfcDecision;

/**
 * Result of every call. The nonzero values match the `efc` exit codes
 * where both exist.
 */
typedef enum EfcStatus {
  EFC_STATUS_OK = 0,
  EFC_STATUS_INVALID_INPUT = 2,
  EFC_STATUS_UNSUPPORTED = 3,
  EFC_STATUS_PRECISION_UNREACHABLE = 4,
  EFC_STATUS_NULL_POINTER = 5,
  EFC_STATUS_PANIC = 6,
} EfcStatus;

/**
 * Opaque measure.
 */
typedef struct EfcMeasure EfcMeasure;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next failing call on the same thread.
 */
const char *efc_last_error(void);

/**
 * Parses a measure file (JSON text).
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum EfcStatus efc_measure_from_json(const char *json, struct EfcMeasure **out);

/**
 * Builds a named fixture: seg, tri, line, ray or ex3d.
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
enum EfcStatus efc_measure_fixture(const char *name, struct EfcMeasure **out);

/**
 * Releases a measure. Null is ignored.
 *
 * # Safety
 * `m` must come from this library and not be used afterwards.
 */
void efc_measure_free(struct EfcMeasure *m);

/**
 * Ambient dimension, 0 for null.
 *
 * # Safety
 * `m` must be null or a live handle.
 */
size_t efc_measure_dim(const struct EfcMeasure *m);

/**
 * Certified enclosure `[lo, hi]` of the log-partition function. `theta`
 * holds `dim` strings, each `"p/q"` or `"ln(p/q)"`.
 *
 * # Safety
 * `theta` must point to `dim` NUL-terminated strings; `lo` and `hi` must be
 * writable.
 */
enum EfcStatus efc_log_partition(const struct EfcMeasure *m,
                                 const char *const *theta,
                                 size_t dim,
                                 double eps,
                                 double *lo,
                                 double *hi);

/**
 * Number of faces of the convex core; `Unsupported` for curve families.
 *
 * # Safety
 * `count` must be writable.
 */
enum EfcStatus efc_face_count(const struct EfcMeasure *m, size_t *count);

/**
 * Variation-closure membership of a member (`{"chain": ..., "theta": ...}`)
 * for the full canonical parameter set.
 *
 * # Safety
 * `member` must be a NUL-terminated string; `out` must be writable.
 */
enum EfcStatus efc_in_variation_closure(const struct EfcMeasure *m,
                                        const char *member,
                                        enum EfcDecision *out);

/**
 * Runs an `efc` command line (without the program name). The report or
 * error document goes to `*out`; the return value is the exit code.
 *
 * # Safety
 * `argv` must point to `argc` NUL-terminated strings; `out` must be writable.
 */
int32_t efc_run(const char *const *argv, size_t argc, char **out);

/**
 * Frees a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void efc_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EFC_H */

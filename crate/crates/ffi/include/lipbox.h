/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#ifndef LIPBOX_H
#define LIPBOX_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

#define LIPBOX_SUITE_S2 1

#define LIPBOX_SUITE_S3 2

#define LIPBOX_SUITE_S4 4

typedef enum LipboxStatus {
  LIPBOX_STATUS_OK = 0,
  /**
   * A verification check failed, or a solver did not converge.
   */
  LIPBOX_STATUS_FAILED = 1,
  /**
   * Malformed instance, unknown object name, bad exponent, ...
   */
  LIPBOX_STATUS_INPUT = 2,
  LIPBOX_STATUS_CAP_EXCEEDED = 3,
  LIPBOX_STATUS_NULL_POINTER = 4,
  /**
   * A panic was caught at the boundary.
   */
  LIPBOX_STATUS_INTERNAL = 5,
} LipboxStatus;

typedef enum LipboxNorm {
  LIPBOX_NORM_LIPL = 0,
  LIPBOX_NORM_LIP = 1,
  LIPBOX_NORM_BLIP = 2,
  LIPBOX_NORM_FREE = 3,
  LIPBOX_NORM_PI = 4,
  LIPBOX_NORM_EPS = 5,
} LipboxNorm;

typedef enum LipboxSumming {
  LIPBOX_SUMMING_LIP_P = 0,
  LIPBOX_SUMMING_Q = 1,
  LIPBOX_SUMMING_DOMINATED = 2,
} LipboxSumming;

typedef enum LipboxRoute {
  LIPBOX_ROUTE_A = 0,
  LIPBOX_ROUTE_B = 1,
  LIPBOX_ROUTE_BOTH = 2,
} LipboxRoute;

/**
 * Opaque handle to a validated instance.
 */
typedef struct LipboxInstance LipboxInstance;

/**
 * Size limits; see `lipbox_caps_default`.
 */
typedef struct LipboxCaps {
  size_t points;
  size_t dim;
  size_t vertices;
  size_t iterations;
} LipboxCaps;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

struct LipboxCaps lipbox_caps_default(void);

/**
 * Message for the last failing call on this thread, or null. Owned by the
 * library and valid until the next call on this thread.
 */
const char *lipbox_last_error(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library, freed once.
 */
void lipbox_string_free(char *s);

/**
 * Parses and validates an instance. `caps` may be null for the defaults.
 *
 * # Safety
 * `json` must be a NUL-terminated string, `caps` null or valid, `out` valid.
 */
enum LipboxStatus lipbox_instance_from_json(const char *json,
                                            const struct LipboxCaps *caps,
                                            struct LipboxInstance **out);

/**
 * # Safety
 * `inst` must be null or a handle from `lipbox_instance_from_json`, freed once.
 */
void lipbox_instance_free(struct LipboxInstance *inst);

/**
 * The instance re-emitted as canonical JSON.
 *
 * # Safety
 * `inst` must be a live handle and `out` valid.
 */
enum LipboxStatus lipbox_instance_to_json(const struct LipboxInstance *inst, char **out);

/**
 * A norm of the named object (`free` takes an expression such as "a+b" or
 * "SPACE:2a - b"). `value` and `report` (JSON) are each optional.
 *
 * # Safety
 * `inst` must be a live handle, `object` a NUL-terminated string, and the
 * out-pointers null or valid.
 */
enum LipboxStatus lipbox_norm(const struct LipboxInstance *inst,
                              enum LipboxNorm kind,
                              const char *object,
                              char **value,
                              char **report);

/**
 * Summing norms. `p` and `q` are rationals as text ("1", "3/2"); `route`
 * only matters for `Dominated`. `value` receives the last entry's value:
 * for dominated (1,1) that is the certified two-measure constant.
 *
 * # Safety
 * As for `lipbox_norm`; `p` and `q` must be NUL-terminated strings.
 */
enum LipboxStatus lipbox_summing(const struct LipboxInstance *inst,
                                 enum LipboxSumming kind,
                                 const char *object,
                                 const char *p,
                                 const char *q,
                                 enum LipboxRoute route,
                                 char **value,
                                 char **report);

/**
 * Integral norm of an operator, optionally with the L∞ factorization
 * (scalar codomain only).
 *
 * # Safety
 * As for `lipbox_norm`.
 */
enum LipboxStatus lipbox_integral(const struct LipboxInstance *inst,
                                  const char *object,
                                  bool factorize,
                                  char **value,
                                  char **report);

/**
 * Replays the identity suites selected by `suites` (a mask of
 * `LIPBOX_SUITE_*`, 0 meaning all). Returns `Failed` if any check fails.
 *
 * # Safety
 * `inst` must be a live handle; every out-pointer may be null.
 */
enum LipboxStatus lipbox_verify(const struct LipboxInstance *inst,
                                uint32_t suites,
                                size_t *total,
                                size_t *failed,
                                char **report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LIPBOX_H */
